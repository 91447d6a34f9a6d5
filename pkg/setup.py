"""Build the optional compiled kernels.

If Cython or a C compiler is unavailable the package installs without the
extension and ``implicitauth.kernels`` falls back to the pure-Python twin.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    pass
else:
    ext_modules = cythonize(
        [
            Extension(
                "implicitauth._ckernels",
                ["src/implicitauth/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                # keep a*b + c unfused so results match the Python twin bit for bit
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
