from pathlib import Path
from setuptools import setup, find_packages

# Read long description from README
root = Path(__file__).parent
long_description = (root / "README.md").read_text(encoding="utf-8")

setup(
    name="stretchchaos",
    version="1.0.0",
    description="Numerical verification of stretching-along-paths chaos for planar maps and switched ODEs",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=("tests*", "examples*")),
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",
        "pyyaml>=6.0.1",
        "tqdm>=4.66.0",
    ],
    extras_require={
        "test": ["pytest>=7"],
    },
    entry_points={
        "console_scripts": [
            # High-level single command
            "stretchchaos = stretchchaos.__main__:cli_entry",
            # Shortcuts for the two most common commands
            "sc-verify  = stretchchaos.__main__:verify_entry",
            "sc-entropy = stretchchaos.__main__:entropy_entry",
        ]
    },
    include_package_data=True,
    license="MIT",
    classifiers=[
        "Programming Language :: Python :: 3 :: Only",
        "License :: OSI Approved :: MIT License",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
