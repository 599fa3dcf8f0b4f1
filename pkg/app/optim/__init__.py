"""Parameter updates: NAdam and the L2 weight penalty."""

from .l2 import L2Config, l2_apply
from .nadam import NadamState, nadam_step

__all__ = ["L2Config", "NadamState", "l2_apply", "nadam_step"]
