"""Build script: compiles the optional edit-distance extension.

The package works without the extension (a pure-Python kernel is selected
at import time); building it just makes corpus-scale scoring much faster.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "dialspeech.scoring._align_cy",
                ["src/dialspeech/scoring/_align_cy.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
