"""Exception hierarchy for the mussel-bed analysis toolkit.

Every failure mode that callers are expected to branch on gets its own
class; the CLI maps them onto exit codes (config -> 2, hypothesis gate
-> 3, numerical failure -> 4).
"""

from __future__ import annotations


class ConfigError(Exception):
    """Invalid configuration input (bad keys, schema violation, bad CLI args)."""


class AnalysisError(Exception):
    """Base class for mathematical/numerical failures during analysis."""


class DomainError(AnalysisError):
    """Parameter values outside the model's validity region."""


class HypothesisError(AnalysisError):
    """A required admissibility hypothesis on (alpha, r, gamma) fails."""


class NoHopfModeError(AnalysisError):
    """Requested spatial mode carries no Hopf frequency."""


class InvariantViolationError(AnalysisError):
    """A quantity the theory guarantees (sign, residual bound) came out wrong."""


class NonSimpleEigenvalueError(AnalysisError):
    """The zero eigenvalue at the pattern-forming mode is not simple."""


class NonResonanceError(AnalysisError):
    """A center-manifold solve hit a (near-)singular characteristic matrix."""


class DegenerateNormalFormError(AnalysisError):
    """Normal-form coefficients land on a degeneracy (zero real part,
    vanishing cubic discriminant d_hat - b*c, or parallel unfolding maps)."""


class SimulationUnstableError(AnalysisError):
    """Direct simulation violated positivity/boundedness or produced
    non-finite values; carries the monitor report."""

    def __init__(self, message: str, report: object | None = None):
        super().__init__(message)
        self.report = report
