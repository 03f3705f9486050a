"""Build script for the optional compiled kernels.

The package works without the extension (a pure-Python implementation is
selected at import time), so a failed compile only costs speed.
"""

import numpy as np
from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.extension import Extension


class optional_build_ext(build_ext):
    """Swallow compiler failures; the pure-Python kernels take over."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        import warnings

        warnings.warn(f"compiled kernels unavailable, using pure-Python fallback: {exc}")


extensions = [
    Extension(
        "driftmix.kernels._ckernels",
        ["src/driftmix/kernels/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

try:
    from Cython.Build import cythonize

    extensions = cythonize(extensions, compiler_directives={"language_level": "3"})
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
