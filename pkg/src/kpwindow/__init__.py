# This file marks the kpwindow directory as a Python package.
__version__ = "0.1.0"
