"""Centralized numerical tolerances.

One frozen record holds every tolerance the analysis pipeline branches
on, so tests and the CLI can tighten/loosen them in a single place.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class NumericalSettings:
    """Tolerances shared across the analysis ops.

    Attributes:
        residual_tol: acceptance bound for characteristic/eigen residuals.
        dedupe_tol: two roots closer than this (complex modulus) are the same.
        golden_tol: bound used when validating solver output against
            closed-form reference expressions.
    """

    residual_tol: float = 1e-10
    dedupe_tol: float = 1e-7
    golden_tol: float = 1e-6


DEFAULT_SETTINGS = NumericalSettings()
