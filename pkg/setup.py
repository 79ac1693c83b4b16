"""Build script with an optional compiled kernel core.

The package is pure Python by default.  When Cython and a C compiler are
available, the hot kernels (CDF recurrences and the solver scan loops) are
compiled into ``dhtplan._backend._fastkern``:

    python setup.py build_ext --inplace

If the extension is absent or fails to build, the package falls back to the
pure-Python twin at import time.  Both backends execute the same arithmetic
in the same order, so results are identical.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/dhtplan/_backend/_fastkern.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
