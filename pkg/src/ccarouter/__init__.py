"""Exact single-photon transport between coupled-cavity-array registers."""

from .dynamics import *  # noqa: F401,F403
from .effective import *  # noqa: F401,F403
from .metrics import *  # noqa: F401,F403
from .model import *  # noqa: F401,F403
from .network import *  # noqa: F401,F403

__version__ = "0.1.0"
