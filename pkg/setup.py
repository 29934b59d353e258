"""Build script for the optional compiled scoring kernel.

The package works without the extension: twentyq.scoring falls back to a
numpy implementation when twentyq._eigcore is absent.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("twentyq._eigcore", ["src/twentyq/_eigcore.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
