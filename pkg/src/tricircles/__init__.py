"""Exact counting of unit circles spanned by point triples on three unit circles."""

__version__ = "0.1.0"
