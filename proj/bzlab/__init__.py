"""Verification laboratory for finitary couplings of diagonal products.

The heavy lifting lives in the C++ extension ``_core``; this package simply
re-exports it.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
