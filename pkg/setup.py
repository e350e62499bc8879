import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "qgol._step_core",
                ["src/qgol/_step_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-Python kernel is selected at import time when the extension is absent.
    ext_modules = []

setup(ext_modules=ext_modules)
