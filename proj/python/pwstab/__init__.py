"""Periodic traveling waves of coupled dispersive systems and their stability checks."""

from ._pwstab import *  # noqa: F401,F403
from ._pwstab import __doc__  # noqa: F401
