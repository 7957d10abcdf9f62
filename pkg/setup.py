import numpy
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class OptionalBuildExt(build_ext):
    """Build the accelerator extension if possible, fall back to pure NumPy otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"sphereflow: skipping compiled kernels ({exc}); NumPy fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"sphereflow: failed to build {ext.name} ({exc}); NumPy fallback will be used")


ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "sphereflow._kernels._speed",
                ["src/sphereflow/_kernels/_speed.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "boundscheck": False,
            "cdivision": True,
            "language_level": "3",
        },
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
