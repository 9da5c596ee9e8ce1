"""sobot: layered social-robot toolkit.

Subpackages:
  codec    - typed message schemas and binary serialization
  bus      - pub/sub middleware, services, launch composition, TCP transport
  bridge   - WebSocket JSON gateway for browser clients
  behavior - REST behavior service with embedded persistence
  vision   - synthetic camera, landmarks, emotion, gaze pipeline
  audio    - PCM source, MFCC/prosody features, sentiment, tokenizer
  bag      - record/replay of topic traffic
  cli      - operator command line (``sobot``)
"""

__version__ = "0.1.0"
