"""Build script for the compiled integration kernel.

The package installs and runs without the extension; halfparity.engine falls
back to the pure-Python kernels when the compiled module is unavailable.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "halfparity.engine._kernel",
        ["src/halfparity/engine/_kernel.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
