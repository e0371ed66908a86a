"""Floating-point oracle layer: finite sections and dense symmetric numerics.

Everything upstream is exact; this module is where operators become N x N
real symmetric matrices (leading-corner truncation) and claims become
floating-point checks: a cyclic Jacobi eigensolver, eigendecomposition
square roots, restricted operator norms over orthonormalized subspace
bases, and the numeric verification of non-attainment witnesses.

Fixed tolerances, two orders of headroom between stages:

* eigensolver off-diagonal target 1e-12 (at most 100 sweeps),
* reconstruction / orthogonality residuals 1e-10,
* orthonormalization pivot 1e-10,
* default verification tolerance 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classify import CompositeOperator, CoordinateWitness, MixedPairsWitness, Witness
from .errors import (
    InvalidSpec,
    NoConvergence,
    NotPositiveSemidefinite,
    PredictionMismatch,
    RankDeficient,
)
from .seqmodel import SequenceSpec
from .shiftapp import WeightedShift

__all__ = [
    "OFF_DIAGONAL_TARGET",
    "MAX_SWEEPS",
    "PIVOT_TOL",
    "DEFAULT_TOL",
    "truncate_diagonal",
    "truncate_shift",
    "truncate_composite",
    "jacobi_eigenvalues",
    "matrix_sqrt",
    "orthonormalize",
    "norm_on_subspace",
    "verify_witness_numeric",
    "WitnessVerification",
    "spectral_count_below",
]

OFF_DIAGONAL_TARGET = 1e-12
MAX_SWEEPS = 100
PIVOT_TOL = 1e-10
DEFAULT_TOL = 1e-8


def truncate_diagonal(seq: SequenceSpec, n: int) -> np.ndarray:
    """Leading N x N corner of the diagonal operator, in floating point."""
    if n < 1:
        raise InvalidSpec("truncation size must be >= 1")
    return np.diag([float(seq.entry(i)) for i in range(1, n + 1)])


def truncate_shift(shift: WeightedShift, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(T_N, T_N^T T_N) for the weighted shift.

    T_N carries the real weights on the subdiagonal (phases contribute a
    sign only for angles 0 and pi; any other phase is represented by the
    modulus, every compared quantity being phase invariant).  The product
    is exactly diag(w_1^2, ..., w_{N-1}^2, 0).
    """
    if n < 2:
        raise InvalidSpec("shift truncations need size >= 2")
    t = np.zeros((n, n))
    for k in range(1, n):
        t[k, k - 1] = shift.weight_sign(k) * float(shift.moduli.entry(k))
    return t, t.T @ t


def truncate_composite(op: CompositeOperator, n: int) -> np.ndarray:
    """Leading N x N corner of alpha*I + K + F."""
    if n < 1:
        raise InvalidSpec("truncation size must be >= 1")
    matrix = np.diag([float(op.diagonal_entry(i)) for i in range(1, n + 1)])
    for coef, vector in op.f_terms:
        u = np.zeros(n)
        touched = False
        for idx, val in vector.items():
            if idx <= n:
                u[idx - 1] = float(val)
                touched = True
        if touched and coef != 0:
            matrix += float(coef) * np.outer(u, u)
    return matrix


def _require_symmetric(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidSpec("expected a square matrix")
    if not np.array_equal(a, a.T):
        raise InvalidSpec("matrix must be symmetric")
    return a


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigenvalues(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Sweeps rotate every off-diagonal pair (skipping exact zeros, which a
    rotation would leave untouched) until the off-diagonal Frobenius norm
    falls below 1e-12; raises NoConvergence after 100 sweeps.  Returns the
    eigenvalues sorted ascending and the orthogonal matrix whose columns
    are the matching eigenvectors, so ``Q @ diag(w) @ Q.T`` reconstructs
    the input.
    """
    a = _require_symmetric(matrix).copy()
    n = a.shape[0]
    q = np.eye(n)
    for sweep in range(MAX_SWEEPS + 1):
        if _off_diagonal_norm(a) < OFF_DIAGONAL_TARGET:
            break
        if sweep == MAX_SWEEPS:
            raise NoConvergence(
                f"off-diagonal norm {_off_diagonal_norm(a):.3e} after {MAX_SWEEPS} sweeps"
            )
        for p in range(n - 1):
            for col in range(p + 1, n):
                apq = a[p, col]
                if apq == 0.0:
                    continue
                theta = (a[col, col] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, col].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, col] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[col, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[col, :] = s * row_p + c * row_q
                a[p, col] = 0.0
                a[col, p] = 0.0
                q_p = q[:, p].copy()
                q_q = q[:, col].copy()
                q[:, p] = c * q_p - s * q_q
                q[:, col] = s * q_p + c * q_q
    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], q[:, order]


def matrix_sqrt(matrix, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in [-tol, 0) are clamped to 0 (roundoff negatives of an
    exactly PSD matrix); anything below -tol raises
    NotPositiveSemidefinite.  A diagonal input short-circuits to the
    elementwise square root: no rotations are performed.
    """
    a = _require_symmetric(matrix)
    off = a - np.diag(np.diag(a))
    if not off.any():
        d = np.diag(a)
        smallest = float(d.min()) if d.size else 0.0
        if smallest < -tol:
            raise NotPositiveSemidefinite(
                f"eigenvalue {smallest} below -tol", eigenvalue=smallest
            )
        return np.diag(np.sqrt(np.clip(d, 0.0, None)))
    eigenvalues, q = jacobi_eigenvalues(a)
    smallest = float(eigenvalues[0])
    if smallest < -tol:
        raise NotPositiveSemidefinite(
            f"eigenvalue {smallest} below -tol", eigenvalue=smallest
        )
    root = q @ np.diag(np.sqrt(np.clip(eigenvalues, 0.0, None))) @ q.T
    return (root + root.T) / 2.0


def orthonormalize(basis, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Modified Gram-Schmidt; columns of the result are orthonormal.

    ``basis`` is array-like of shape (m, N), one spanning vector per row.
    A vector whose residual drops below the pivot tolerance (relative to
    its original size) raises RankDeficient.
    """
    vectors = np.atleast_2d(np.asarray(basis, dtype=float))
    m, n = vectors.shape
    if m > n:
        raise InvalidSpec("more basis vectors than ambient dimensions")
    q = np.zeros((n, m))
    for i in range(m):
        v = vectors[i].copy()
        original = np.linalg.norm(v)
        if i:
            v -= q[:, :i] @ (q[:, :i].T @ v)
        norm = np.linalg.norm(v)
        if norm <= pivot_tol * max(1.0, original):
            raise RankDeficient(f"basis vector {i + 1} is numerically dependent")
        q[:, i] = v / norm
    return q


def norm_on_subspace(matrix, basis) -> tuple[float, np.ndarray]:
    """Operator norm of the matrix restricted to span(basis), with maximizer.

    Orthonormalizes the basis to Q and takes the square root of the top
    eigenvalue of Q^T M^T M Q; the returned unit vector realizes the norm
    inside the subspace.
    """
    a = _require_symmetric(matrix)
    q = orthonormalize(basis)
    if q.shape[0] != a.shape[0]:
        raise InvalidSpec("basis vectors must match the matrix dimension")
    off = a - np.diag(np.diag(a))
    if not off.any():
        mq = np.diag(a)[:, None] * q
    else:
        mq = a @ q
    gram = mq.T @ mq
    gram = (gram + gram.T) / 2.0
    eigenvalues, vectors = jacobi_eigenvalues(gram)
    top = float(eigenvalues[-1])
    maximizer = q @ vectors[:, -1]
    return math.sqrt(max(top, 0.0)), maximizer


def _witness_basis(witness: Witness, m: int, n: int) -> np.ndarray:
    """First m witness basis vectors inside the N-truncation, one per row."""
    if isinstance(witness, CoordinateWitness):
        indices = witness.indices(m)
        if indices[-1] > n:
            raise InvalidSpec(
                f"witness index {indices[-1]} exceeds the truncation size {n}"
            )
        basis = np.zeros((m, n))
        for row, idx in enumerate(indices):
            basis[row, idx - 1] = 1.0
        return basis
    if isinstance(witness, MixedPairsWitness):
        rows = witness.pair_table(m)
        if len(rows) < m:
            raise InvalidSpec("witness index rules ran dry before m vectors")
        basis = np.zeros((m, n))
        for k, a_idx, b_idx, _v, _u, _mu, t_sq in rows:
            if max(a_idx, b_idx) > n:
                raise InvalidSpec(
                    f"witness index {max(a_idx, b_idx)} exceeds the truncation size {n}"
                )
            basis[k - 1, a_idx - 1] = 1.0
            basis[k - 1, b_idx - 1] = math.sqrt(float(t_sq))
        return basis
    raise InvalidSpec(f"unknown witness type: {type(witness).__name__}")


@dataclass(frozen=True)
class WitnessVerification:
    """Numeric restricted norms against the symbolic schedule."""

    norms: tuple[float, ...]
    predicted: tuple[float, ...]
    sup: float
    strictly_increasing: bool
    below_sup: bool
    max_prediction_error: float


def verify_witness_numeric(
    seq: SequenceSpec,
    witness: Witness,
    m_max: int,
    n: int,
    tol: float = DEFAULT_TOL,
) -> WitnessVerification:
    """Check a witness numerically inside the N-truncation.

    For each m <= m_max the first m witness vectors are materialized and
    the restricted norm nu_m computed; the report records whether the nu
    are strictly increasing and all below the claimed supremum.  A
    deviation of any nu_m from its symbolic prediction beyond ``tol``
    raises PredictionMismatch: the two layers disagree, which is a bug.
    """
    if m_max < 1:
        raise InvalidSpec("m_max must be >= 1")
    matrix = truncate_diagonal(seq, n)
    norms = []
    for m in range(1, m_max + 1):
        basis = _witness_basis(witness, m, n)
        value, _ = norm_on_subspace(matrix, basis)
        norms.append(value)
    predicted = [float(p) for p in witness.predicted_norms(m_max)]
    errors = [abs(nu - p) for nu, p in zip(norms, predicted)]
    worst = max(errors)
    if worst > tol:
        at = errors.index(worst) + 1
        raise PredictionMismatch(
            f"restricted norm {norms[at - 1]} vs predicted {predicted[at - 1]} at m={at}"
        )
    sup = float(witness.sup)
    return WitnessVerification(
        norms=tuple(norms),
        predicted=tuple(predicted),
        sup=sup,
        strictly_increasing=all(b > a for a, b in zip(norms, norms[1:])),
        below_sup=all(nu < sup for nu in norms),
        max_prediction_error=worst,
    )


def spectral_count_below(matrix, threshold: float, tol: float = DEFAULT_TOL) -> int:
    """Number of eigenvalues strictly below threshold - tol."""
    eigenvalues, _ = jacobi_eigenvalues(matrix)
    return int(np.count_nonzero(eigenvalues < threshold - tol))
