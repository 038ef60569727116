import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="bootagg",
    version="0.1.0",
    description="Bootstrap uncertainty visualization by aggregating one rendered image per resample",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Visualization",
    ],
    install_requires=['numpy>=1.17', 'scipy>=1.7', 'pypng>=0.0.20', 'configobj>=5.0.6', 'cryptography>=3.4.7'],
    extras_require={
        "test": ['pytest>=6.0'],
    },
    entry_points={
        "console_scripts": ['bootagg=BootAgg.Utilities.bootagg:main'],
    },
    python_requires='>=3.8',
)
