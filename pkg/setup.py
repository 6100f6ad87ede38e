import numpy
from setuptools import Extension, setup

# The compiled kernels are optional: if the build fails (no compiler, no
# cython) the package still installs and falls back to the pure-numpy
# implementations in ferrocal._kernels._pure.
ext = Extension(
    "ferrocal._kernels._native",
    ["src/ferrocal/_kernels/_native.pyx"],
    include_dirs=[numpy.get_include()],
    extra_compile_args=["-O3"],
    optional=True,
)

try:
    from Cython.Build import cythonize

    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
