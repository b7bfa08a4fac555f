"""Setup script for kkkpsim package."""

import boilerplates.setup


class Package(boilerplates.setup.Package):
    """Package metadata."""

    name = 'kkkpsim'
    description = 'Simulator of the two-pulse KKKP quantum key distribution protocol' \
        ' and of the impersonation attack against it.'
    url = 'https://github.com/mbdevpl/kkkpsim'
    license_str = 'GPL-3.0-or-later'
    classifiers = [
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Education',
        'Intended Audience :: Science/Research',
        'Natural Language :: English',
        'Operating System :: MacOS',
        'Operating System :: Microsoft :: Windows',
        'Operating System :: POSIX :: Linux',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Programming Language :: Python :: 3 :: Only',
        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Security :: Cryptography',
        'Topic :: Utilities',
        'Typing :: Typed']
    keywords = ['quantum key distribution', 'QKD', 'polarization', 'simulation', 'cryptanalysis']
    entry_points = {'console_scripts': ['kkkpsim = kkkpsim.__main__:main']}


if __name__ == '__main__':
    Package.setup()
