"""Monte Carlo fault-tolerance toolkit for the [[7,1,3]] CSS code."""

__version__ = "0.1.0"
