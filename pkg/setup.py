"""Build script.

The package is pure Python by default.  When Cython and a C compiler are
available, the simplex feasibility kernel in ``credalve._lp._speedups`` is
compiled for a large speedup on redundancy-elimination heavy workloads; the
pure-Python kernel is selected automatically at import time otherwise.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "credalve._lp._speedups",
                ["src/credalve/_lp/_speedups.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
