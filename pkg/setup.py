from setuptools import Extension, setup

# The compiled kernel is optional: the package falls back to the pure-Python
# twin (dt4vertex._kernels_py) when the extension is absent.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("dt4vertex._kernels_cy", ["src/dt4vertex/_kernels_cy.pyx"])],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
