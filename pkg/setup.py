import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("MORPHISHASH_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "morphishash._native",
                    ["src/morphishash/_native.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # Pure-python fallback is selected at import time; the package
        # remains fully functional without the compiled kernels.
        ext_modules = []

setup(ext_modules=ext_modules)
