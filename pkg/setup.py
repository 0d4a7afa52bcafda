#!/usr/bin/env python

from setuptools import setup, find_packages

with open("README.md", encoding="utf-8") as fh:
    long_description = fh.read()

setup(name='quantum_periods',
      version='0.1.0',
      description='Exact tools for regularized quantum periods of Fano manifolds',
      long_description=long_description,
      long_description_content_type="text/markdown",
      packages=find_packages('src'),
      keywords=['Fano manifolds', 'quantum periods', 'Picard-Fuchs operators', 'exact arithmetic'],
      package_dir={"": "src"},
      package_data={
        'quantum_periods_py' : [
          'data/databases/*.txt', 'data/testing/*.xml',
        ],
      },
      python_requires='>=3.9',
      install_requires=[
        'numpy',
        'scipy',
        'tqdm',
        'sympy',
        'lxml',
        'pyparsing>=3.1',
      ],
      extras_require={
        'tests': ['requests'],
      },
      entry_points={
        'console_scripts': ['quantum-periods=quantum_periods_py.cli:main'],
      },
    )
