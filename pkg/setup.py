"""Build the optional Cython kernels.

The package works without them: ``sharploss._backend`` falls back to the
pure numpy implementations when the extension cannot be imported.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("SHARPLOSS_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None

    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "sharploss._kernels",
                    ["src/sharploss/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    # no -ffast-math / -march=native: results must be reproducible
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    optional=True,
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )

setup(ext_modules=ext_modules)
