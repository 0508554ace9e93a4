"""Builds the optional Cython root-tracking kernel.

When Cython or a compiler is unavailable the package still installs and
falls back to the pure-Python kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("hitchin_kit._ctrack", ["src/hitchin_kit/_ctrack.pyx"],
                   include_dirs=[numpy.get_include()], optional=True)],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
