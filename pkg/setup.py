#!/usr/bin/env python
# -*- coding: utf8 -*-

from setuptools import setup
from intercloud import __version__

# read requirements.txt
with open("requirements.txt") as f:
    required = [l.strip() for l in f if l.strip() and not l.startswith('#')]

setup(
    name="intercloud",
    version=__version__,
    packages=['intercloud', 'intercloud.services', 'intercloud.scenarios',
              'intercloud_lib'],

    # Project uses reStructuredText, so ensure that the docutils get
    # installed or upgraded on the target machine
    install_requires=required,

    package_data={
        '': ['*.txt', '*.rst'],
        # bundled topologies and scenarios
        'intercloud': ['data/*.topo', 'data/*.scn', 'data/*.trace'],
    },

    entry_points={
        'console_scripts': ['intercloud = intercloud.cli:main'],
    },

    test_suite="intercloud",

    # metadata for upload to PyPI
    author="Harald Schilly",
    author_email="harald.schilly@univie.ac.at",
    description="Simulator of a federation of clouds: trust, messaging, data exchange, migration",
    license='Apache 2.0',
    keywords="intercloud federation cloud trust messaging migration simulation",

    classifiers=[
        "Development Status :: 2 - Pre-Alpha",
        "Topic :: System :: Distributed Computing",
        "License :: OSI Approved :: Apache Software License",
        "Programming Language :: Python :: 3",
        "Operating System :: POSIX :: Linux"
    ]
)
