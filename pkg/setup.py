import sys

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "pnpairs._scan._core",
                ["src/pnpairs/_scan/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover
    sys.stderr.write(
        f"warning: building without compiled scan kernels ({exc}); "
        "the pure-Python fallback will be used\n"
    )

setup(ext_modules=ext_modules)
