"""Build script for the optional compiled kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time); when Cython and a C toolchain are present the hot
RK4 loops compile to superlum.engine._core.
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
                "superlum.engine._core",
                ["src/superlum/engine/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
