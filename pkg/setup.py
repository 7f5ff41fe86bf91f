"""Build script for the optional compiled BPE kernels.

The package works without the extension (a pure-Python fallback is selected
at import time); set LEXBIND_NO_EXTENSION=1 to skip compilation entirely.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("LEXBIND_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/lexbind/_bpe_fast.pyx"],
            language_level="3",
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
