"""Region-network trajectory generation toolkit.

The heavy lifting lives in the C++ extension; this package re-exports it.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
