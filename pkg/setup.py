import os

from setuptools import Extension, setup

# LANEARITH_PURE=1 skips the extension; the package then runs on its
# pure-Python kernels.
if os.environ.get("LANEARITH_PURE") == "1":
    ext_modules = []
else:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "lanearith._core",
                ["src/lanearith/_core.pyx"],
                include_dirs=["src/lanearith/_csrc"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
