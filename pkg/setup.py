import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("HADAMARD_DSE_PURE", "") not in ("1", "true", "yes"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "hadamard_dse._kernels",
                    ["src/hadamard_dse/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
