"""Exact model of infinite nonnegative sequences (positive diagonal operators).

A sequence is described by finitely many data: a nonempty list of strands,
interleaved round-robin, plus a finite override map.  A strand is either a
constant value or a geometric approach ``limit ± amplitude * ratio**k`` to
its limit.  Every spectral question asked downstream (limit points,
membership, which elements sit below a threshold) is decided exactly from
this description with rational arithmetic; no floating point enters here.

Overrides replace the materialized entry at finitely many indices.  The
symbolic spectrum operations treat the value family of each strand as a
whole: a finite override map adds points but never removes strand values
from the answer.  This keeps all answers invariant under finite
perturbations, which is exactly the property the classifier consumes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

from .errors import InvalidSpec

__all__ = [
    "Approach",
    "Strand",
    "SequenceSpec",
    "FiniteBelow",
    "InfiniteBelow",
    "BelowAlphaResult",
]

_ZERO = Fraction(0)


def _as_fraction(value, what: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise InvalidSpec(f"{what} must be an exact rational, got {value!r}")
    return Fraction(value)


class Approach(enum.Enum):
    """How a strand's values relate to its limit."""

    BELOW = "below"
    EXACT = "exact"
    ABOVE = "above"


@dataclass(frozen=True)
class Strand:
    """One constant or geometric family of sequence values.

    The k-th occurrence (k = 0, 1, 2, ...) takes the value

    * ``limit - amplitude * ratio**k``  (BELOW),
    * ``limit``                         (EXACT),
    * ``limit + amplitude * ratio**k``  (ABOVE).

    Geometric strands are strictly monotone, pairwise distinct, and
    converge to ``limit``; BELOW strands must keep every value >= 0.
    """

    limit: Fraction
    approach: Approach
    amplitude: Fraction | None = None
    ratio: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "limit", _as_fraction(self.limit, "limit"))
        try:
            object.__setattr__(self, "approach", Approach(self.approach))
        except ValueError:
            raise InvalidSpec(
                f"approach must be one of below/exact/above, got {self.approach!r}"
            ) from None
        if self.limit < 0:
            raise InvalidSpec("limit must be nonnegative")
        if self.approach is Approach.EXACT:
            if self.amplitude is not None or self.ratio is not None:
                raise InvalidSpec("exact strands take no amplitude or ratio")
            return
        if self.amplitude is None or self.ratio is None:
            raise InvalidSpec("geometric strands need both amplitude and ratio")
        object.__setattr__(self, "amplitude", _as_fraction(self.amplitude, "amplitude"))
        object.__setattr__(self, "ratio", _as_fraction(self.ratio, "ratio"))
        if self.amplitude <= 0:
            raise InvalidSpec("amplitude must be positive")
        if not _ZERO < self.ratio < 1:
            raise InvalidSpec("ratio must lie in (0,1)")
        if self.approach is Approach.BELOW and self.limit - self.amplitude < 0:
            raise InvalidSpec(
                "below strand would produce a negative value (limit - amplitude < 0)"
            )

    @property
    def is_geometric(self) -> bool:
        return self.approach is not Approach.EXACT

    def deviation(self, k: int) -> Fraction:
        """|value(k) - limit| = amplitude * ratio**k; zero for exact strands."""
        if not self.is_geometric:
            return _ZERO
        return self.amplitude * self.ratio**k

    def value(self, k: int) -> Fraction:
        """The k-th occurrence of this strand, k >= 0."""
        if k < 0:
            raise ValueError("occurrence index must be >= 0")
        if self.approach is Approach.ABOVE:
            return self.limit + self.deviation(k)
        if self.approach is Approach.BELOW:
            return self.limit - self.deviation(k)
        return self.limit


@dataclass(frozen=True)
class FiniteBelow:
    """Finitely many spectrum elements below the queried threshold."""

    values: frozenset[Fraction]


@dataclass(frozen=True)
class InfiniteBelow:
    """A strand certifies an essential-spectrum point below the threshold.

    ``strand_index`` names the first strand that either generates
    infinitely many distinct values below the threshold or pins an
    infinite-multiplicity value there.
    """

    strand_index: int


BelowAlphaResult = FiniteBelow | InfiniteBelow


@dataclass(frozen=True)
class SequenceSpec:
    """Round-robin interleaving of strands plus a finite override map.

    Index n >= 1 materializes strand ``(n-1) mod m`` at occurrence
    ``(n-1) div m`` unless n is overridden.  All entries are >= 0, so the
    spec is the diagonal of a positive operator.  Values are immutable
    after construction; every operation is a pure function.
    """

    strands: tuple[Strand, ...]
    overrides: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        strands = tuple(self.strands)
        if not strands:
            raise InvalidSpec("at least one strand is required")
        if not all(isinstance(s, Strand) for s in strands):
            raise InvalidSpec("strands must be Strand values")
        object.__setattr__(self, "strands", strands)
        clean: dict[int, Fraction] = {}
        for n, v in dict(self.overrides).items():
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise InvalidSpec(f"override indices must be positive integers, got {n!r}")
            value = _as_fraction(v, f"override value at index {n}")
            if value < 0:
                raise InvalidSpec(f"override value at index {n} must be nonnegative")
            clean[n] = value
        object.__setattr__(self, "overrides", clean)

    @property
    def num_strands(self) -> int:
        return len(self.strands)

    def strand_at(self, n: int) -> tuple[int, int]:
        """(strand index, occurrence) materializing at index n, ignoring overrides."""
        return (n - 1) % self.num_strands, (n - 1) // self.num_strands

    def entry(self, n: int) -> Fraction:
        """The n-th diagonal entry (n >= 1), exact."""
        if n < 1:
            raise ValueError("entries are indexed from 1")
        value = self.overrides.get(n)
        if value is not None:
            return value
        j, k = self.strand_at(n)
        return self.strands[j].value(k)

    def entries(self, count: int) -> list[Fraction]:
        return [self.entry(n) for n in range(1, count + 1)]

    def strand_indices(self, j: int, *, skip_overridden: bool = True) -> Iterator[int]:
        """Ascending indices where strand j materializes."""
        if not 0 <= j < self.num_strands:
            raise ValueError(f"no strand {j}")
        n = j + 1
        while True:
            if not (skip_overridden and n in self.overrides):
                yield n
            n += self.num_strands

    def essential_spectrum(self) -> frozenset[Fraction]:
        """The strand limits, deduplicated.

        Each strand occupies infinitely many indices: geometric strands
        accumulate at their limit, exact strands repeat theirs with
        infinite multiplicity.  A finite override map contributes nothing.
        """
        return frozenset(s.limit for s in self.strands)

    def spectrum_contains(self, x) -> bool:
        """Exact membership of x in the closure of the value family.

        True iff x is a strand limit, an override value, or a strand value
        ``limit ± amplitude * ratio**k``.  The geometric search iterates k
        only while ``amplitude * ratio**k`` is at least |x - limit|, so it
        always terminates.
        """
        x = _as_fraction(x, "query value")
        if x in self.overrides.values():
            return True
        for s in self.strands:
            if s.limit == x:
                return True
        for s in self.strands:
            if not s.is_geometric:
                continue
            diff = x - s.limit
            if s.approach is Approach.ABOVE and diff > 0:
                target = diff
            elif s.approach is Approach.BELOW and diff < 0:
                target = -diff
            else:
                continue
            t = s.amplitude
            while t > target:
                t *= s.ratio
            if t == target:
                return True
        return False

    def spectrum_elements_below(self, threshold) -> BelowAlphaResult:
        """Classify the set of spectrum elements strictly below ``threshold``.

        Any strand whose limit sits below the threshold (or a BELOW strand
        whose limit equals it) certifies failure and is reported as
        InfiniteBelow.  Otherwise the finitely many contributions come
        from BELOW strands aiming above the threshold and from overrides.
        """
        threshold = _as_fraction(threshold, "threshold")
        for j, s in enumerate(self.strands):
            if s.limit < threshold or (
                s.approach is Approach.BELOW and s.limit <= threshold
            ):
                return InfiniteBelow(j)
        values: set[Fraction] = set()
        for s in self.strands:
            if s.approach is Approach.BELOW and s.limit > threshold:
                gap = s.limit - threshold
                t = s.amplitude
                while t > gap:
                    values.add(s.limit - t)
                    t *= s.ratio
        for v in self.overrides.values():
            if v < threshold:
                values.add(v)
        return FiniteBelow(frozenset(values))

    def indices_below(self, threshold) -> list[int] | None:
        """All indices n with entry(n) < threshold, or None when there are
        infinitely many."""
        threshold = _as_fraction(threshold, "threshold")
        for s in self.strands:
            if s.limit < threshold or (
                s.approach is Approach.BELOW and s.limit <= threshold
            ):
                return None
        found = [n for n, v in self.overrides.items() if v < threshold]
        for j, s in enumerate(self.strands):
            if s.approach is Approach.BELOW and s.limit > threshold:
                gap = s.limit - threshold
                t = s.amplitude
                k = 0
                while t > gap:
                    n = j + 1 + k * self.num_strands
                    if n not in self.overrides:
                        found.append(n)
                    t *= s.ratio
                    k += 1
        return sorted(found)
