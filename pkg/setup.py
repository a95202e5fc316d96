from setuptools import setup, find_packages

setup(
    name="determinantal-lab",
    version="1.0.0",
    description="Exact computation, sampling and coupling searches for discrete determinantal measures",
    author="Determinantal Lab contributors",
    packages=find_packages(exclude=["tests"]),
    package_data={
        "determinantal_lab": ["data/*.json"],
    },
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=2.0.0",
        "networkx>=3.0",
    ],
    entry_points={
        "console_scripts": [
            "determinantal-lab=determinantal_lab.main:main",
        ],
    },
    python_requires=">=3.8",
)
