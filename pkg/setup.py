import os

from setuptools import setup

ext_modules = []
if not os.environ.get("ZOCR_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("zocr._kernels", ["src/zocr/_kernels.pyx"], include_dirs=[np.get_include()])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # no build toolchain: the package falls back to zocr._kernels_py
        ext_modules = []

setup(ext_modules=ext_modules)
