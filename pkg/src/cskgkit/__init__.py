"""Toolkit for symbolic commonsense knowledge graphs.

Ingest dumps into canonical tuples, normalize and compare graphs, build
head-disjoint splits, export training and prompt text, score generations
and aggregate human ratings.
"""
__version__ = "0.1.0"
TOOL_NAME = "cskgkit"
