"""Build script: compiles the optional fast kernel extension.

The package is pure Python plus one Cython module with the pairwise kernel
loops.  If Cython or a C compiler is unavailable the extension is skipped and
the numpy fallback in tentqmc._kernels is used instead.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "tentqmc._speedups",
                ["src/tentqmc/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
