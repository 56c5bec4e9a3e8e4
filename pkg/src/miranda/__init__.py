"""Miranda: rank-metric hash-and-sign signatures from Add-and-Remove Gabidulin codes."""

__version__ = "0.1.0"
