"""Build script for the optional compiled backend.

The package works without the extension (a pure numpy backend is selected at
import time), so a missing C toolchain must not break installation.
"""

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, otherwise continue without it."""

    def run(self):
        try:
            build_ext.run(self)
        except Exception as exc:
            print(f"warning: compiled backend skipped ({exc}); "
                  "falling back to the pure numpy backend")

    def build_extension(self, ext):
        try:
            build_ext.build_extension(self, ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "falling back to the pure numpy backend")


extensions = [
    Extension(
        "oscpulse._kernels",
        ["src/oscpulse/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", "-fopenmp"],
        extra_link_args=["-fopenmp"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(extensions,
                            compiler_directives={"language_level": "3"})
except ImportError:
    print("warning: Cython not available; installing without the compiled backend")
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
