import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

PYX = "src/spinweave/graph/_fastcore.pyx"

if cythonize is not None and os.path.exists(PYX):
    extensions = cythonize(
        [
            Extension(
                "spinweave.graph._fastcore",
                [PYX],
                language="c++",
                extra_compile_args=["-O2", "-std=c++11"],
            )
        ],
        language_level=3,
    )
else:
    # No Cython: the package still works on the pure-Python graph kernel.
    extensions = []

setup(ext_modules=extensions)
