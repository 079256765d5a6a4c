"""Contextual reward shaping for multi-agent football defense.

Thin Python surface over the C++ core: pass model, pitch control, EPV,
reward shaping, VDN pieces, the simulator and the training driver.
"""

from ._pitchrl import *  # noqa: F401,F403
from ._pitchrl import __version__  # noqa: F401
