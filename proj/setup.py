import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "pyvemo",
    sorted(glob.glob("src/*.cpp")) + ["bindings/pybind_module.cpp"],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(
    name="pyvemo",
    version="0.1.0",
    description="Epoch scheduler and complex-baseband co-simulator bindings",
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
    zip_safe=False,
    python_requires=">=3.9",
)
