import pytest

from sobot.codec import default_registry


@pytest.fixture
def registry():
    return default_registry()
