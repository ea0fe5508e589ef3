import os
import tempfile

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext as _build_ext

from Cython.Build import cythonize
import numpy as np


def _compiler_supports_openmp():
    """Probe the active C compiler for -fopenmp so serial builds still work."""
    import distutils.ccompiler
    import distutils.sysconfig

    cc = distutils.ccompiler.new_compiler()
    distutils.sysconfig.customize_compiler(cc)
    with tempfile.TemporaryDirectory() as tmp:
        src = os.path.join(tmp, "omp_probe.c")
        with open(src, "w") as fh:
            fh.write("#include <omp.h>\nint main(void){return omp_get_num_threads();}\n")
        try:
            objs = cc.compile([src], output_dir=tmp, extra_postargs=["-fopenmp"])
            cc.link_executable(objs, os.path.join(tmp, "omp_probe"),
                               extra_postargs=["-fopenmp"])
        except Exception:
            return False
    return True


# Serial builds auto-vectorize better under this toolchain and sweep-level
# parallelism runs whole jobs in separate processes, so OpenMP is opt-in.
use_openmp = bool(os.environ.get("RARELIMIT_OPENMP")) and _compiler_supports_openmp()
omp_args = ["-fopenmp"] if use_openmp else []
macros = [("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")]
if use_openmp:
    macros.append(("RARELIMIT_WITH_OPENMP", "1"))

ext = Extension(
    "rarelimit._core",
    ["src/rarelimit/_core.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O3", "-march=native", "-ffp-contract=off", "-fno-math-errno"] + omp_args,
    extra_link_args=list(omp_args),
    define_macros=macros,
)

setup(ext_modules=cythonize([ext], language_level=3))
