"""Build script for the optional compiled grid-path core.

The package works without the extension: terragp._core falls back to the
pure-Python twin at import time. Building needs cython + numpy + a C
compiler; failures degrade to a warning instead of aborting the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"compiled core skipped ({exc}); pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled core skipped ({exc}); pure-Python fallback will be used")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        warnings.warn(f"compiled core skipped ({exc}); pure-Python fallback will be used")
        return []
    return cythonize(
        [
            Extension(
                "terragp._core._gridpath_c",
                ["src/terragp/_core/_gridpath_c.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
