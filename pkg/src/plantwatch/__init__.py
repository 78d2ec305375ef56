"""Deterministic six-stage water-treatment plant simulator with an
attack-injection layer and two placements of the same invariant-based
process-anomaly detector (in-controller and at-historian)."""

__version__ = "0.1.0"
