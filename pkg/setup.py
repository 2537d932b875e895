from setuptools import setup, find_packages

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(
    name="atbench",
    author="atbench developers",
    install_requires=['numpy>=1.20', 'pyparsing>=3.0', 'scipy>=1.6'],
    extras_require={
        'test': ['pytest', 'hypothesis'],
        'docs': ['Sphinx', 'alabaster'],
    },
    description="Simulated benchmarking of GPU auto-tuning optimizers on exhaustive tuning caches",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=['tests', 'docs']),
    entry_points={
        'console_scripts': ['atbench=atbench.cli:main'],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering",
        "Topic :: Software Development :: Libraries"
    ],
    python_requires='>=3.8',
)
