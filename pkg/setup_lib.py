#!/usr/bin/env python

from setuptools import setup

from intercloud_lib import __version__

setup(
    name="intercloud_lib",
    version=__version__,
    packages=['intercloud_lib'],

    install_requires=[
        "numpy        >= 1.5.0",
        "cryptography >= 2.0"
    ],

    package_data={
        '': ['*.txt', '*.rst']
    },

    test_suite="intercloud_lib",

    # metadata for upload to PyPI
    author="Harald Schilly",
    author_email="harald.schilly@univie.ac.at",
    description="Intercloud protocols: trust roots, messaging, UDF archives, platform checks",
    license='Apache 2.0',
    keywords="intercloud federation cloud trust messaging",
)
