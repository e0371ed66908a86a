"""Weighted shift operators and their norm-attainment conditions.

A weighted shift sends (x1, x2, ...) to (0, w1*x1, w2*x2, ...).  Its
modulus is the diagonal operator with entries |w_n|, so every question
about attaining norms reduces to the diagonal machinery.  This module
also evaluates the two condition branches stated directly in terms of the
weight sequence and cross-checks them against the diagonal classifier;
the two verdicts must always agree.

Branch selection: any geometric strand puts the weight set in the
infinite-spectrum branch (the value set has limit points); all-exact
strands give a finite spectrum.  Conditions, per branch:

* infinite spectrum: (i) the geometric strand limits form a single point
  alpha, (ii) no other value repeats infinitely often, (iii) only
  finitely many weights fall below alpha;
* finite spectrum: (i') the closure of the weight set is finite (always
  true here), (ii') exactly one value occurs infinitely often.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .classify import ANVerdict, classify_an
from .errors import InvalidSpec
from .seqmodel import Approach, SequenceSpec

__all__ = [
    "WeightedShift",
    "InfiniteSpectrumBranch",
    "FiniteSpectrumBranch",
    "ShiftConditionReport",
    "classify_shift",
]


@dataclass(frozen=True)
class WeightedShift:
    """Exact weight moduli plus optional complex phases on finitely many weights.

    Phases never touch the moduli, and the attainment conditions depend on
    moduli alone, so finitely many phases are enough to exercise the
    invariance.
    """

    moduli: SequenceSpec
    phases: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.moduli, SequenceSpec):
            raise InvalidSpec("moduli must be a SequenceSpec")
        clean: dict[int, float] = {}
        for n, angle in dict(self.phases).items():
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise InvalidSpec(f"phase indices must be positive integers, got {n!r}")
            clean[n] = float(angle)
        object.__setattr__(self, "phases", clean)

    def modulus(self) -> SequenceSpec:
        """Diagonal symbol of |T| = (T*T)^(1/2): the moduli; phases drop out."""
        return self.moduli

    def weight_sign(self, n: int) -> int:
        """Real sign the phase contributes to a real truncation.

        Only angles 0 and pi produce real weights; any other angle leaves
        the modulus in charge (truncations are kept real throughout).
        """
        angle = self.phases.get(n)
        if angle is None:
            return 1
        return -1 if math.isclose(angle, math.pi, abs_tol=1e-12) else 1


@dataclass(frozen=True)
class InfiniteSpectrumBranch:
    """Condition report when the weight set has limit points.

    ``alpha`` is the unique geometric limit when (i) holds, otherwise the
    largest geometric limit (the verdict is already false then, the value
    just keeps the report deterministic).  ``violating_values`` are the
    values other than alpha repeating infinitely often — the failures of
    (ii).  ``below_alpha_indices`` lists the finitely many weight indices
    below alpha, or None when there are infinitely many.
    """

    i: bool
    ii: bool
    iii: bool
    alpha: Fraction
    violating_values: frozenset[Fraction]
    below_alpha_indices: tuple[int, ...] | None


@dataclass(frozen=True)
class FiniteSpectrumBranch:
    """Condition report when all strands are constant: sigma is a finite set."""

    i_prime: bool
    ii_prime: bool
    sigma: frozenset[Fraction]
    infinite_multiplicity_values: frozenset[Fraction]


@dataclass(frozen=True)
class ShiftConditionReport:
    branch: InfiniteSpectrumBranch | FiniteSpectrumBranch
    verdict: bool


def classify_shift(shift: WeightedShift) -> tuple[ShiftConditionReport, ANVerdict]:
    """Evaluate the weight-sequence conditions and the diagonal classifier.

    Returns the per-branch condition report and the verdict of the
    spectral classifier applied to |T|; the report's verdict and the
    classifier's must agree for every valid shift.
    """
    if not isinstance(shift, WeightedShift):
        raise InvalidSpec("classify_shift expects a WeightedShift")
    seq = shift.modulus()
    geometric_limits = frozenset(s.limit for s in seq.strands if s.is_geometric)
    if geometric_limits:
        cond_i = len(geometric_limits) == 1
        alpha = max(geometric_limits)
        violating = frozenset(
            s.limit
            for s in seq.strands
            if s.approach is Approach.EXACT and s.limit != alpha
        )
        cond_ii = not violating
        below = seq.indices_below(alpha)
        cond_iii = below is not None
        branch: InfiniteSpectrumBranch | FiniteSpectrumBranch = InfiniteSpectrumBranch(
            cond_i,
            cond_ii,
            cond_iii,
            alpha,
            violating,
            tuple(below) if below is not None else None,
        )
        verdict = cond_i and cond_ii and cond_iii
    else:
        values = frozenset(s.limit for s in seq.strands)
        sigma = values | frozenset(seq.overrides.values())
        i_prime = True
        ii_prime = len(values) == 1
        branch = FiniteSpectrumBranch(i_prime, ii_prime, sigma, values)
        verdict = i_prime and ii_prime
    return ShiftConditionReport(branch, verdict), classify_an(seq)
