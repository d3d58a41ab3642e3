"""Builds the compiled fiber kernel when Cython and a C compiler are present.

Without them the package installs as pure Python and falls back to the
numpy kernel at import time.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("arithchern.hermitian._fiber_ext",
                   ["src/arithchern/hermitian/_fiber_ext.pyx"],
                   include_dirs=[np.get_include()],
                   define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                   extra_compile_args=["-O3"], optional=True)],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
