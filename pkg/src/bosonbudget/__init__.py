"""Loss budgets for photonic boson-sampling interferometers."""

__version__ = "0.1.0"
