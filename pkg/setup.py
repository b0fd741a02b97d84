"""Build script: compiles the optional kernel extension when possible.

The compiled module must be bit-identical to the pure-Python fallback, so
FMA contraction is disabled (-ffp-contract=off); see refcast/_kernels. If
Cython or a C toolchain is missing the build degrades to pure Python: the
extension is optional and the package selects a backend at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("REFCAST_SKIP_EXTENSION") not in ("1", "true", "yes"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "refcast._kernels._core",
                    sources=["src/refcast/_kernels/_core.pyx"],
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
