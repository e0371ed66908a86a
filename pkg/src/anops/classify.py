"""Decision procedure for absolutely norm attaining positive diagonal operators.

The test is purely spectral: a positive diagonal operator attains its norm
on every nonzero closed subspace exactly when its essential spectrum is a
single point ``alpha`` and only finitely many spectrum elements lie below
``alpha``.  On the strand model both conditions are decidable exactly, and
each verdict ships with a machine-checkable artifact:

* positive verdicts carry the explicit split ``alpha*I + K+ + F`` with
  ``K+`` a nonnegative compact diagonal and ``F`` a finite negative
  diagonal correction;
* negative verdicts carry a witness subspace on which the restricted norm
  strictly increases to a supremum that no vector attains.

Composite operators ``alpha*I + K + F`` (diagonal compact plus symmetric
finite rank) are certified separately: once positivity is checked on
finite sections covering the range of F, the composite is norm attaining
on every subspace by the structure characterization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Iterator, Mapping

from .errors import InvalidSpec, NotApplicable, NotPositive
from .seqmodel import Approach, FiniteBelow, InfiniteBelow, SequenceSpec, Strand

__all__ = [
    "Decomposition",
    "CoordinateWitness",
    "MixedPairsWitness",
    "Witness",
    "MultipleEssentialPoints",
    "InfinitelyManyBelowAlpha",
    "NotANReason",
    "IsAN",
    "NotAN",
    "ANVerdict",
    "CompositeOperator",
    "Certificate",
    "classify_an",
    "decompose",
    "build_witness",
    "an_certificate",
]

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Decomposition:
    """Exact split ``entry(n) = alpha + kplus(n) + f(n)``.

    ``f_entries`` holds the finitely many strictly negative corrections at
    the indices whose entry lies below alpha; ``kplus`` is the nonnegative
    compact remainder, zero on the support of F.  With no entry below
    alpha the F part is empty (the empty sum is zero).
    """

    alpha: Fraction
    f_entries: Mapping[int, Fraction]
    seq: SequenceSpec

    def f(self, n: int) -> Fraction:
        return self.f_entries.get(n, _ZERO)

    def kplus(self, n: int) -> Fraction:
        if n in self.f_entries:
            return _ZERO
        return self.seq.entry(n) - self.alpha

    @property
    def rank_f(self) -> int:
        return len(self.f_entries)


@dataclass(frozen=True)
class MultipleEssentialPoints:
    """The essential spectrum holds more than one point."""

    points: frozenset[Fraction]


@dataclass(frozen=True)
class InfinitelyManyBelowAlpha:
    """Infinitely many spectrum elements sit below the single essential point."""

    alpha: Fraction
    strand_index: int


NotANReason = MultipleEssentialPoints | InfinitelyManyBelowAlpha


@dataclass(frozen=True)
class CoordinateWitness:
    """Coordinate subspace on which the restricted norm is never attained.

    Spanned by the coordinate vectors of one strand's non-overridden
    indices.  The entry values there strictly increase towards ``sup``
    (the strand limit) without reaching it, so the restricted norm over
    the first m coordinate vectors equals the m-th entry value and the
    supremum over the closed span is ``sup``, attained by no vector.
    """

    seq: SequenceSpec
    strand_index: int
    excluded_indices: frozenset[int]
    sup: Fraction

    def __post_init__(self):
        strand = self.seq.strands[self.strand_index]
        if strand.approach is not Approach.BELOW:
            raise InvalidSpec("coordinate witnesses ride a below-approach strand")
        if strand.limit != self.sup:
            raise InvalidSpec("witness sup must be the strand limit")

    def indices(self, count: int) -> list[int]:
        """First ``count`` non-excluded indices of the strand, ascending."""
        return list(islice(self.seq.strand_indices(self.strand_index), count))

    def predicted_norms(self, count: int) -> list[Fraction]:
        """Restricted norms over the first 1..count coordinate vectors."""
        return [self.seq.entry(n) for n in self.indices(count)]


@dataclass(frozen=True)
class MixedPairsWitness:
    """Two-coordinate ramp climbing to ``sup`` between two strand families.

    When no strand approaches the top essential point from below, pairs of
    coordinates do the job: the k-th basis vector is
    ``e_{a_k} + t_k * e_{b_k}`` where ``a_k`` runs through a low strand
    (limit ``low``, entry v_k < (low+sup)/2) and ``b_k`` through a top
    strand (limit ``sup``, entry u_k >= sup).  The mixing weight

        t_k = sqrt((mu_k^2 - v_k^2) / (u_k^2 - mu_k^2)),
        mu_k = sup - (sup - low) / (2k),          k = 1, 2, ...

    makes the Rayleigh quotient of the k-th vector exactly mu_k^2, so the
    restricted norm over the first m vectors is mu_m, strictly increasing
    with supremum ``sup`` and never attained.  ``t_k`` is irrational in
    general; ``t_squared`` stays exact and the numeric layer takes the
    square root.
    """

    seq: SequenceSpec
    low_strand: int
    top_strand: int
    low: Fraction
    sup: Fraction

    def __post_init__(self):
        if not self.low < self.sup:
            raise InvalidSpec("mixed-pairs witnesses need two distinct limits")
        if self.seq.strands[self.low_strand].limit != self.low:
            raise InvalidSpec("low strand limit mismatch")
        if self.seq.strands[self.top_strand].limit != self.sup:
            raise InvalidSpec("top strand limit mismatch")

    def _low_index_iter(self) -> Iterator[int]:
        half = (self.low + self.sup) / 2
        for n in self.seq.strand_indices(self.low_strand):
            if self.seq.entry(n) < half:
                yield n

    def low_indices(self, count: int) -> list[int]:
        return list(islice(self._low_index_iter(), count))

    def top_indices(self, count: int) -> list[int]:
        return list(islice(self.seq.strand_indices(self.top_strand), count))

    def mu(self, k: int) -> Fraction:
        if k < 1:
            raise ValueError("pairs are indexed from 1")
        return self.sup - (self.sup - self.low) / (2 * k)

    def pair_table(self, count: int) -> list[tuple[int, int, int, Fraction, Fraction, Fraction, Fraction]]:
        """Rows (k, a_index, b_index, v_k, u_k, mu_k, t_k^2) for k = 1..count."""
        rows = []
        for k, (a, b) in enumerate(zip(self.low_indices(count), self.top_indices(count)), start=1):
            v = self.seq.entry(a)
            u = self.seq.entry(b)
            mu = self.mu(k)
            t_sq = (mu * mu - v * v) / (u * u - mu * mu)
            rows.append((k, a, b, v, u, mu, t_sq))
        return rows

    def t_squared(self, k: int) -> Fraction:
        return self.pair_table(k)[-1][6]

    def predicted_norms(self, count: int) -> list[Fraction]:
        """Restricted norms over the first 1..count pair vectors: the mu ramp."""
        return [self.mu(k) for k in range(1, count + 1)]


Witness = CoordinateWitness | MixedPairsWitness


@dataclass(frozen=True)
class IsAN:
    """The operator attains its norm on every nonzero closed subspace."""

    alpha: Fraction
    decomposition: Decomposition

    @property
    def is_an(self) -> bool:
        return True


@dataclass(frozen=True)
class NotAN:
    reason: NotANReason
    witness: Witness

    @property
    def is_an(self) -> bool:
        return False


ANVerdict = IsAN | NotAN


def classify_an(seq: SequenceSpec) -> ANVerdict:
    """Decide norm attainment on all subspaces for a positive diagonal operator.

    IsAN iff the essential spectrum is a single point alpha and only
    finitely many spectrum elements lie below alpha; on the strand model
    that means all strand limits coincide and no strand approaches from
    below.  When both failures hold, the multiple-essential-points reason
    takes priority.
    """
    if not isinstance(seq, SequenceSpec):
        raise InvalidSpec("classify_an expects a SequenceSpec")
    essential = seq.essential_spectrum()
    if len(essential) == 1:
        alpha = next(iter(essential))
        below = seq.spectrum_elements_below(alpha)
        if isinstance(below, FiniteBelow):
            return IsAN(alpha, decompose(seq, alpha))
        reason: NotANReason = InfinitelyManyBelowAlpha(alpha, below.strand_index)
    else:
        reason = MultipleEssentialPoints(essential)
    return NotAN(reason, build_witness(seq))


def decompose(seq: SequenceSpec, alpha) -> Decomposition:
    """Split a norm-attaining diagonal into ``alpha*I + K+ + F`` exactly.

    F collects ``entry(n) - alpha`` at the finitely many indices whose
    entry lies below alpha; K+ is ``entry(n) - alpha`` elsewhere.
    """
    alpha = Fraction(alpha)
    if seq.essential_spectrum() != frozenset({alpha}):
        raise NotApplicable(
            "decompose needs a single essential point equal to the given alpha"
        )
    indices = seq.indices_below(alpha)
    if indices is None:
        raise NotApplicable("infinitely many entries below alpha; classify first")
    f_entries = {n: seq.entry(n) - alpha for n in indices}
    return Decomposition(alpha, f_entries, seq)


def build_witness(seq: SequenceSpec) -> Witness:
    """Construct a subspace refuting norm attainment for a non-AN spec.

    If any strand approaches its limit from below, the one with the
    largest limit b carries a coordinate witness: entries on its indices
    strictly increase to b.  Otherwise the failure is two essential
    points, and pairs mixing the lowest-limit strand with the
    highest-limit one ramp up to the top limit instead.
    """
    below = [(j, s) for j, s in enumerate(seq.strands) if s.approach is Approach.BELOW]
    if below:
        j, strand = max(below, key=lambda item: item[1].limit)
        excluded = frozenset(
            n for n in seq.overrides if (n - 1) % seq.num_strands == j
        )
        return CoordinateWitness(seq, j, excluded, strand.limit)
    limits = [s.limit for s in seq.strands]
    top = max(limits)
    low = min(limits)
    if low == top:
        raise NotApplicable("operator attains its norm on every subspace; no witness")
    low_strand = limits.index(low)
    top_strand = limits.index(top)
    return MixedPairsWitness(seq, low_strand, top_strand, low, top)


@dataclass(frozen=True)
class CompositeOperator:
    """``alpha*I + K + F``: scalar, positive compact diagonal, symmetric finite rank.

    ``k_diag`` is a sequence spec whose strands all converge to 0 (its
    entries are the diagonal of K, nonnegative and vanishing at infinity).
    ``f_terms`` is a finite list of rank-one symmetric terms
    ``coef * u u^T`` with finitely supported exact vectors.
    """

    alpha: Fraction
    k_diag: SequenceSpec
    f_terms: tuple[tuple[Fraction, Mapping[int, Fraction]], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.alpha < 0:
            raise InvalidSpec("alpha must be nonnegative")
        if not isinstance(self.k_diag, SequenceSpec):
            raise InvalidSpec("k_diag must be a SequenceSpec")
        if any(s.limit != 0 for s in self.k_diag.strands):
            raise InvalidSpec("k_diag strands must have limit 0 (compactness)")
        terms = []
        for coef, vector in self.f_terms:
            coef = Fraction(coef)
            clean: dict[int, Fraction] = {}
            for idx, val in dict(vector).items():
                if isinstance(idx, bool) or not isinstance(idx, int) or idx < 1:
                    raise InvalidSpec(f"rank-one vector indices must be positive integers, got {idx!r}")
                clean[idx] = Fraction(val)
            terms.append((coef, clean))
        object.__setattr__(self, "f_terms", tuple(terms))

    def diagonal_entry(self, n: int) -> Fraction:
        """n-th diagonal entry of alpha*I + K (exact; F not included)."""
        return self.alpha + self.k_diag.entry(n)

    def f_support(self) -> tuple[int, ...]:
        """Ascending indices carrying a nonzero contribution of F."""
        support: set[int] = set()
        for coef, vector in self.f_terms:
            if coef == 0:
                continue
            support.update(idx for idx, val in vector.items() if val != 0)
        return tuple(sorted(support))

    def f_matrix(self) -> tuple[tuple[int, ...], list[list[Fraction]]]:
        """F compressed to its support: (support indices, exact symmetric rows)."""
        support = self.f_support()
        pos = {idx: i for i, idx in enumerate(support)}
        rows = [[_ZERO] * len(support) for _ in support]
        for coef, vector in self.f_terms:
            if coef == 0:
                continue
            items = [(pos[idx], val) for idx, val in vector.items() if val != 0]
            for i, vi in items:
                for j, vj in items:
                    rows[i][j] += coef * vi * vj
        return support, rows

    def rank_f(self) -> int:
        """Exact rank of F over the rationals."""
        _, rows = self.f_matrix()
        return _rational_rank(rows)


def _rational_rank(rows: list[list[Fraction]]) -> int:
    """Rank by exact Gaussian elimination."""
    if not rows:
        return 0
    work = [list(row) for row in rows]
    n_rows, n_cols = len(work), len(work[0])
    rank = 0
    for col in range(n_cols):
        pivot = next((i for i in range(rank, n_rows) if work[i][col] != 0), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        lead = work[rank]
        for i in range(rank + 1, n_rows):
            if work[i][col] != 0:
                factor = work[i][col] / lead[col]
                work[i] = [a - factor * b for a, b in zip(work[i], lead)]
        rank += 1
        if rank == n_rows:
            break
    return rank


@dataclass(frozen=True)
class Certificate:
    """Positivity record entitling a composite to the norm-attaining conclusion."""

    is_positive: bool
    min_eigenvalue_per_size: Mapping[int, float]
    rank_f: int


def an_certificate(op: CompositeOperator, sizes, tol: float = 1e-8) -> Certificate:
    """Certify numerically that a composite operator is positive, hence AN.

    The smallest eigenvalue of each truncation must clear ``-tol``.
    Beyond the finite support of F the diagonal ``alpha + k_diag(n) >= 0``
    is exact and automatic, so the evaluated sizes always include one
    covering the whole support; with that section nonnegative the full
    operator is positive.  A failing size raises NotPositive with the
    offending eigenvalue and the certificate is withheld.
    """
    from .numlab import jacobi_eigenvalues, truncate_composite

    if not isinstance(op, CompositeOperator):
        raise InvalidSpec("an_certificate expects a CompositeOperator")
    sizes = [int(n) for n in sizes]
    if not sizes:
        raise InvalidSpec("at least one truncation size is required")
    if min(sizes) < 1:
        raise InvalidSpec("truncation sizes must be >= 1")
    checked = set(sizes)
    support = op.f_support()
    if support and max(support) > max(checked):
        checked.add(max(support))
    minima: dict[int, float] = {}
    for n in sorted(checked):
        eigenvalues, _ = jacobi_eigenvalues(truncate_composite(op, n))
        smallest = float(eigenvalues[0])
        minima[n] = smallest
        if smallest < -tol:
            raise NotPositive(
                f"composite is not positive: eigenvalue {smallest} at size {n}",
                eigenvalue=smallest,
                size=n,
            )
    return Certificate(True, minima, op.rank_f())
