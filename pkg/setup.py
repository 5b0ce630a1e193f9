import os

from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
if not os.environ.get("TURBO_NO_EXTENSION"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        print("Cython/numpy not available, installing pure-Python kernels only")
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "turbo._kernels",
                    ["src/turbo/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
