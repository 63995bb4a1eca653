"""Exact workbench for lattice vertex superalgebras, their characters and N=4 structure."""

from .series import CycNum, EvalPoint, JacobiSeries, SeriesError

__all__ = ["CycNum", "EvalPoint", "JacobiSeries", "SeriesError"]
