#!/usr/bin/env python
import os.path
import sys

from setuptools import find_packages, setup

about = {}
with open(os.path.join("hybridlchs", "version.py")) as f:
    exec(f.read(), about)


needs_pytest = {"pytest", "test", "ptr"}.intersection(sys.argv)
pytest_runner = ["pytest-runner"] if needs_pytest else []

setup(
    name="hybridlchs",
    version=about["__version__"],
    packages=find_packages(exclude=["tests", "examples*"]),
    scripts=[],
    include_package_data=True,
    package_data={"hybridlchs.data": ["*.yaml", "*.json"]},
    entry_points={"console_scripts": ["hybridlchs=hybridlchs.cli:run"]},
    description="Hybrid oscillator-qubit LCHS simulator for linear non-unitary dynamics",
    long_description=open("README.md", "rb").read().decode("utf8", "ignore"),
    long_description_content_type="text/markdown",
    license="BSD 3-clause",
    test_suite="tests",
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.21",
        "scipy>=1.8",
        "pandas",
        "pyyaml",
        "tqdm",
        "matplotlib",
    ],
    tests_require=["pytest"],
    setup_requires=["flake8"] + pytest_runner,
    classifiers=[
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)
