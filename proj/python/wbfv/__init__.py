"""Python access to the wbfv finite-volume core."""

from ._wbfv import *  # noqa: F401,F403
from ._wbfv import Error, Grid, State  # noqa: F401
