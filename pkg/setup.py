"""Build hooks: compile the optional Cython speedups, fall back to pure Python."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SYMPINV_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/sympinv/_speedups.pyx"],
            language_level=3,
        )
    except ImportError:
        # No Cython available: the package runs on the pure-Python kernels.
        pass

setup(ext_modules=ext_modules)
