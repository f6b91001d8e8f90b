"""Build hook for the optional compiled MLP kernel.

The package is pure Python plus one Cython extension for the per-batch
training step. If Cython or a C toolchain is unavailable the build falls
back to the numpy kernel transparently; nothing else changes.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                name="fundcast.model._mlp_kernel",
                sources=["src/fundcast/model/_mlp_kernel.pyx"],
                include_dirs=[numpy.get_include()],
                # built in place for the host; the numpy twin covers any
                # environment where this does not compile
                extra_compile_args=["-O3", "-march=native", "-funroll-loops"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
