"""Curvature algebra, pinching constants and graphical mean curvature flow on tori."""

__version__ = "0.1.0"
