import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("ENTROPIK_PURE"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("entropik._poly_cy", ["src/entropik/_poly_cy.pyx"])],
            language_level=3,
        )
    except ImportError:
        # No Cython: the pure-Python twin is selected at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
