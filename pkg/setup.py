from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the accelerator if a compiler is around, otherwise skip it.

    The package falls back to the pure-Python kernels at import time, so a
    failed extension build must not fail the install.
    """

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: skipping compiled kernels ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: could not build {ext.name} ({exc})")


try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "graphcohom.kernels._speedups",
                ["src/graphcohom/kernels/_speedups.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
