import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python kernels are used instead
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext = Extension(
        "tqc._ckernels",
        ["src/tqc/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
        optional=True,  # a failed compile falls back to tqc._pykernels
    )
    ext_modules = cythonize([ext], compiler_directives={"language_level": 3})

setup(ext_modules=ext_modules)
