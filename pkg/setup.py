"""Build script.

The package is pure Python with one optional Cython accelerator for the
Monte Carlo path kernels. If Cython or a C compiler is unavailable the
extension is skipped and the pure-Python kernels are used instead; the
two implementations are interchangeable (see ruinlab.backend).

Build the accelerator in place with:

    python3 setup.py build_ext --inplace
"""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/ruinlab/_kernels.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
