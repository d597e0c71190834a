import os

from setuptools import Extension, setup

# The accelerated congruence-closure kernel is optional: if Cython (or a C
# compiler) is unavailable the package falls back to the pure-Python backend
# selected at import time in groundeq.closure.
ext_modules = []
if os.environ.get("GROUNDEQ_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "groundeq._ccore",
                    ["src/groundeq/_ccore.pyx"],
                    extra_compile_args=["-O2"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
