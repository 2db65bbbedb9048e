#!/usr/bin/env python
# -*- coding: utf-8 -*-
import io
import os

from setuptools import find_packages, setup

here = os.path.abspath(os.path.dirname(__file__))
with io.open(os.path.join(here, "README.md"), encoding="utf-8") as f:
    long_description = "\n" + f.read()

setup(
    name="sublaplacian-sdk",
    version="1.0.0",
    description="Spectral calculus for sub-Laplacians on two-step stratified Lie groups:"
                " symplectic decompositions, Laguerre calculus, Mehler kernels, spectral cluster norms"
                " and restriction-type estimates.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="Lido",
    author_email="info@lido.fi",
    python_requires=">=3.7,<4",
    package_dir={"": "."},
    packages=find_packages(exclude=("tests",)),
    install_requires=[
        "numpy>=1.21,<3",
        "scipy>=1.7,<2",
        "matplotlib>=3.4,<4",
        "typing_extensions>=3.7; python_version<'3.8'",
    ],
    tests_require=["pytest==6.2.4", "pytest-mock>=3.6.1"],
    entry_points={
        "console_scripts": ["sublaplacian=sublaplacian_sdk.main:main"],
    },
    include_package_data=True,
    license="MIT",
    classifiers=[
        "License :: OSI Approved :: MIT License",
        "Development Status :: 5 - Production/Stable",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        # Supported Python versions
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
    ],
    dependency_links=[],
)
