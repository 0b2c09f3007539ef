"""Occupation-similarity graph pipeline.

Builds a graph of occupations linked by shared essential skills, annotates
it with labour-market supply/demand counts and automation probabilities,
computes a deterministic 2-D layout and exports a static bundle for the
interactive viewer.
"""

__version__ = "0.1.0"
