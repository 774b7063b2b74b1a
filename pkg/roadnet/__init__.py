"""
Road network classification: TNTP parsing, topology features, dimensionality
reduction, clustering and cluster quality scoring.
"""

__version__ = "0.1.1"
