"""Desk-Matting: trimap-free two-branch image matting at desk scale."""

__version__ = "0.1.0"
