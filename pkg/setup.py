"""Build script for the optional compiled simulation kernel.

The package works without the extension (a pure-Python engine with identical
output is selected at import time), so a failed compile only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "levelbound._ea_kernel",
                ["src/levelbound/_ea_kernel.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"levelbound: skipping compiled simulation kernel ({exc!r}); "
          "the pure-Python engine will be used")

setup(ext_modules=ext_modules)
