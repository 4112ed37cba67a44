import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bgk_lowrank._kernels._maxwell",
                ["src/bgk_lowrank/_kernels/_maxwell.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # pure-Python fallback kernels are selected at import time
    ext_modules = []

setup(ext_modules=ext_modules)
