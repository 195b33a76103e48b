"""Multi-UAV thermal soaring simulator."""

__version__ = "1.0.0"
