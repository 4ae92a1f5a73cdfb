import os

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [Extension(
            "wavefuse.kernels._ckernels",
            ["src/wavefuse/kernels/_ckernels.pyx"],
            include_dirs=["src/wavefuse/kernels"],
            extra_compile_args=["-O3", "-ffp-contract=off"],
        )],
        language_level=3,
    )
except ImportError:
    extensions = []

if os.environ.get("WAVEFUSE_NO_EXT"):
    extensions = []

setup(ext_modules=extensions)
