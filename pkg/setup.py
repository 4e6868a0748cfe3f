"""
Setup script for the Nielsen realizability toolkit
"""

from setuptools import setup, find_packages

with open("Documentation/README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [line.strip() for line in fh if line.strip() and not line.startswith("#")]

setup(
    name="nielsen-realizability",
    version="1.0.0",
    author="Nielsen Realizability Team",
    author_email="contact@example.com",
    description="Verdicts, exact tables and seeded samplers for Nielsen realizability in O(n, Z)",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    py_modules=["nielsen_main"],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.10",
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "nielsen-realize=nielsen_main:main",
        ],
    },
)
