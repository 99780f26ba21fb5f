import os
from setuptools import setup

with open(os.path.join("abspec", "version.txt"), "r") as file_handler:
    __version__ = file_handler.read().strip()

with open('requirements.txt') as f:
    reqs = f.read().splitlines()

setup(name='abspec',
      version=__version__,
      packages=['abspec', 'abspec.utils'],
      install_requires=reqs,
      include_package_data=True,
      package_data={'abspec': ['version.txt']},
      entry_points={
          'console_scripts': [
              'abspec=abspec.cli:main'
          ]
      },
      extras_require={
          'extras': [
              'pytest',  # Unit test repository
              'autopep8',  # code formatting
              'sphinx',  # documentation
              'sphinx-rtd-theme'  # documentation theme
          ],
          'test': [
              'pytest'
          ],
          'dev': [
              'autopep8'
          ],
          'doc': [
              'sphinx',
              'sphinx-rtd-theme'
          ]
      }
      )
