"""Spiral cut-paths on polyhedra, their planar developments and overlap tests."""
__version__ = "0.1.0"
