"""Numerical analytic continuation over loop spaces of the complex quadric."""
__version__ = "0.1.0"
