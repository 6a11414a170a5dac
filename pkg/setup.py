#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Spectrum/bispectrum estimation of causal, noncausal and mixed autoregressions."""

from os.path import dirname, join

from setuptools import setup


def read(fname):
    """Return contents of file `fname` in this directory."""
    with open(join(dirname(__file__), fname)) as fp:
        return fp.read()


version = read("bispecar/version").strip()
long_description = read("README_PYPI.rst")

name = "bispecar"
author = "bispecar contributors"
url = "https://pypi.org/project/bispecar/"
description = (
    "Identify causal, noncausal and mixed AR models by spectrum/bispectrum "
    "minimum distance"
)
keywords = "bispectrum noncausal autoregression time-series"
packages = ["bispecar"]
package_data = {"bispecar": ["version"]}
classifiers = [
    "Development Status :: 4 - Beta",
    "License :: OSI Approved :: MIT License",
    "Operating System :: OS Independent",
    "Intended Audience :: Science/Research",
    "Natural Language :: English",
    "Programming Language :: Python :: 3.8",
    "Topic :: Scientific/Engineering :: Mathematics",
]
install_requires = [
    "numpy>=1.20",
    "scipy>=1.7",
    "pandas>=1.2",
    "joblib>=1.0",
]
tests_require = [
    "coverage",
    "pytest>=6",
    "pytest-cov",
    "flake8==3.8.1",
    "flake8-docstrings==1.5.0",
]

zip_safe = False

setup(
    name=name,
    version=version,
    description=description,
    long_description=long_description,
    keywords=keywords,
    author=author,
    url=url,
    packages=packages,
    package_data=package_data,
    include_package_data=True,
    classifiers=classifiers,
    install_requires=install_requires,
    tests_require=tests_require,
    extras_require={"test": tests_require},
    entry_points={"console_scripts": ["bispecar=bispecar.cli:main"]},
    python_requires=">=3.8",
    zip_safe=zip_safe,
)
