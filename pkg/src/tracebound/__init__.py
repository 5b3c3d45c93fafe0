"""Certified numerical bounds for the smallest limit point of mean
traces of totally positive algebraic integers."""

__version__ = "0.1.0"
