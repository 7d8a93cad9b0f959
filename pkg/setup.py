"""Build hooks for the optional compiled kernels.

The package is pure Python plus one optional Cython extension; when Cython,
numpy headers, or a C compiler are unavailable the extension is skipped and
the numpy fallback backend is used at runtime.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("momentkit._kernels", ["src/momentkit/_kernels.pyx"],
                   include_dirs=[numpy.get_include()], optional=True)],
        language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)
