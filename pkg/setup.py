#!/usr/bin/env python

"""The setup script."""

from setuptools import setup, find_packages

with open('README.rst') as readme_file:
    readme = readme_file.read()

with open('HISTORY.rst') as history_file:
    history = history_file.read()

requirements = [
    'Django>=3.2, <4.0',
    'persisting-theory',
    'regex',
    'toml',
    'numpy>=1.20',
    'scipy',
]

test_requirements = [
    'hypothesis',
]

setup(
    author="Joseph Fall",
    author_email='powderflask@gmail.coom',
    python_requires='>=3.8',
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering',
    ],
    description="Dimension-reduced channel feedback simulation for RIS-assisted multi-user downlink.",
    entry_points={
        'console_scripts': [
            'ris-sim=ris_feedback.cli:main',
        ],
    },
    install_requires=requirements,
    extras_require={'test': test_requirements},
    license="MIT license",
    long_description=readme + '\n\n' + history,
    include_package_data=True,
    keywords='ris_feedback',
    name='django_ris_feedback',
    packages=find_packages(include=['ris_feedback', 'ris_feedback.*']),
    test_suite='tests',
    tests_require=test_requirements,
    url='https://github.com/powderflask/django_ris_feedback',
    version='0.1.0',
    zip_safe=False,
)
