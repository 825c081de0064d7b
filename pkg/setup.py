"""Build script: compiles the isotonic-regression kernel when Cython and a C
compiler are available.  The package falls back to a pure-Python kernel at
import time, so the extension is strictly optional."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "ordcif._kernels",
                ["src/ordcif/_kernels.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
