"""Counting formulas, cost models, statistics and the parameter registry."""
from __future__ import annotations

from .counting import *  # noqa: F401,F403
