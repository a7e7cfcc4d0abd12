"""Exact LP/SDP bounds on quantum code parameters with rational certificates."""

__version__ = "0.1.0"
