import os

from setuptools import Extension, setup

# The compiled kernels are optional: when Cython (or a C compiler) is not
# available the package falls back to the pure-Python implementations in
# sobot._kernels.pure.  Set SOBOT_SKIP_EXT=1 to force a pure build.
ext_modules = []
if os.environ.get("SOBOT_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "sobot._kernels._fast",
                    ["src/sobot/_kernels/_fast.pyx"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
