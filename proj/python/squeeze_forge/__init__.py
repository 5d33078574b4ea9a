"""Squeezing, nonadiabaticity and irreversible work of the frequency-modulated oscillator."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
