"""Cross-ratio maps of quadrilateral linkages and planar robot 3-arms."""

__version__ = "0.1.0"
