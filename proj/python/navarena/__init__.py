"""Python bindings for the navarena simulator, planners, trainer and benchmark."""

from ._navarena import *  # noqa: F401,F403
from ._navarena import __doc__  # noqa: F401

__version__ = "0.1.0"
