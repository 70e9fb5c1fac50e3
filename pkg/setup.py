#!/usr/bin/env python

from setuptools import find_packages, setup
import os

__here__ = os.path.abspath(os.path.dirname(__file__))

# define __version__
exec(open(os.path.join(__here__, 'explicable_design', '_version.py')).read())


setup(
    name='explicable-design',
    description='Explicable planning and environment design for explicability',
    version=__version__,
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    entry_points={
        'console_scripts': [
            'explicable-design = explicable_design.harness.cli:main',
        ]
    },
    python_requires='>=3.8',
    install_requires=['pyparsing>=3.0'],
    extras_require={
        'test': ['pytest>=6.0', 'pytest-cov', 'hypothesis>=6.0'],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],
)
