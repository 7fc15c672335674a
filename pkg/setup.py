#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# Copyright (c) 2026, the gspdc developers. All rights reserved.
# This file is distributed under the terms of the BSD 3-Clause license.
# See the file 'LICENSE' in the root directory of the present distribution,
# or https://opensource.org/licenses/BSD-3-Clause
#
from setuptools import find_packages, setup

with open("README.rst") as readme:
    long_description = readme.read()

setup(
    name='gspdc',
    version='0.1.0',
    packages=find_packages('src'),
    package_dir={'': 'src'},
    include_package_data=True,
    package_data={
        'gspdc': ['schemas/*.xsd', 'presets/*.xml', 'templates/*.jinja'],
    },
    entry_points={
        'console_scripts': ['gspdc=gspdc.__main__:main']
    },
    python_requires='>=3.8',
    install_requires=['xmlschema>=1.8', 'jinja2', 'numpy>=1.19', 'scipy>=1.6'],
    license='BSD 3-Clause',
    description='Monte Carlo simulator of a gated SPDC single photon source '
                'and photon counting statistics toolkit',
    long_description=long_description,
    long_description_content_type='text/x-rst',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'License :: OSI Approved :: BSD License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3 :: Only',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering :: Physics',
        'Intended Audience :: Science/Research',
    ]
)
