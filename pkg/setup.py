"""Build script: compiles the optional fast kernels.

The package works without the extension (a NumPy fallback is selected at
import time), so any failure here downgrades to a pure build instead of
aborting the install.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "citerank.kernels._native",
                ["src/citerank/kernels/_native.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    import sys

    print(f"citerank: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
