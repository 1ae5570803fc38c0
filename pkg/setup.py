from setuptools import find_packages, setup


DESCRIPTION = '''\
Beltree learns, converts and propagates Dempster-Shafer belief networks in pure Python'''


setup(
    name='Beltree',
    description=DESCRIPTION,
    author="Christian Dean",
    version='0.1.0',
    packages=find_packages(exclude=['tests']),
    license='PD',
    python_requires='>=3.9',
    install_requires=[
        'numpy>=1.20',
        'networkx>=2.6',
    ],
    extras_require={
        'tests': ['pytest', 'hypothesis'],
    },
    entry_points={
        'console_scripts': [
            'beltree = src.beltree:main',
        ],
    },
)
