"""Build script for the optional compiled scan kernels.

The extension is a performance add-on: heavytail._kernels falls back to a
pure-Python implementation with identical operation order when the compiled
module is absent, so a failed extension build never blocks installation.
"""

from setuptools import Extension, setup

# -ffp-contract=off: no fused multiply-add, so the compiled scans produce
# bit-identical results to the pure-Python path. No -ffast-math for the
# same reason (compensated summation relies on strict IEEE ordering).
EXTRA_COMPILE_ARGS = ["-O3", "-ffp-contract=off"]


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "heavytail._kernels._core",
        ["src/heavytail/_kernels/_core.pyx"],
        extra_compile_args=EXTRA_COMPILE_ARGS,
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=extensions())
