"""Build script: compiles the optional simplex extension.

The package works without the extension (a pure numpy kernel is selected at
import time); compilation failures therefore downgrade to a warning instead
of aborting the install.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - exotic toolchains
            warnings.warn(f"building the compiled kernel failed ({exc}); "
                          "falling back to the pure-python kernel")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            warnings.warn(f"building {ext.name} failed ({exc}); "
                          "falling back to the pure-python kernel")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:  # pragma: no cover
        return []
    ext = Extension(
        "ssdm._simplex",
        sources=["src/ssdm/_simplex.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
