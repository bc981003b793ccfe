import os

import numpy as np
from setuptools import setup

ext_modules = []
if not os.environ.get("LICENSEGRAPH_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:  # pure-Python install; kernels fall back at import
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "licensegraph._kernels",
                    ["src/licensegraph/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
