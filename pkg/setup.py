import os

import numpy as np
from setuptools import Extension, setup

# Pure-Python installs (no compiler / no Cython) still work: the package
# falls back to tstein._pykernels at import time.
ext_modules = []
if os.environ.get("TSTEIN_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "tstein._ckernels",
                    ["src/tstein/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
