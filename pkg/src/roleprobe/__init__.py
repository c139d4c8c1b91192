"""Grammatical-role probing toolkit.

Pipeline: parse dependency treebanks, extract transitive clauses, build
controlled perturbations (argument swaps, local scrambles), embed sentences
into a layered archive, train per-layer subject/object probes, and report
accuracy and probability curves split by prototypicality.
"""

__version__ = "0.1.0"
