"""Majorization checks, T-transform constructions, and weighted majorization.

Plain majorization ``y ≺ x`` is checked through decreasing-order partial
sums; a certificate either reports the first violated prefix or carries
an explicit doubly stochastic matrix with ``y = A x``, built from at most
``m - 1`` T-transforms.  Weighted majorization of ``(y, b)`` by ``(x, a)``
is witnessed by a row-stochastic matrix ``A`` with ``a = b A`` and
``y = A x``; this module verifies such witnesses and generates consistent
pairs from them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    LengthMismatch,
    NotMajorized,
    PointOutOfInterval,
    ValidationError,
)

#: Default absolute tolerance for partial-sum and residual comparisons.
DEFAULT_TOL = 1e-9

#: Row/column sums of a stochastic matrix may deviate by this much.
MATRIX_SUM_TOL = 1e-12

#: Entries in [-1e-14, 0) are clamped to zero; anything lower is rejected.
ENTRY_CLAMP_TOL = 1e-14


def _as_vector(values, label: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{label} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError(f"{label} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{label} must be finite")
    return arr


@dataclass(frozen=True)
class WeightedVector:
    """Points with nonnegative weights, optionally pinned to an interval.

    Attributes:
        points: Real data points.
        weights: Nonnegative weights, same length as ``points``.
        interval: Optional closed interval every point must lie in.
    """

    points: np.ndarray
    weights: np.ndarray
    interval: Optional[tuple[float, float]] = None

    def __post_init__(self) -> None:
        pts = _as_vector(self.points, "points")
        wts = _as_vector(self.weights, "weights")
        if pts.shape != wts.shape:
            raise ValidationError(
                f"points and weights must have equal length, got {pts.size} and {wts.size}"
            )
        if np.any(wts < 0.0):
            raise ValidationError("weights must be nonnegative")
        if self.interval is not None:
            lo, hi = float(self.interval[0]), float(self.interval[1])
            slack = 1e-12 * max(1.0, abs(lo), abs(hi))
            if np.any(pts < lo - slack) or np.any(pts > hi + slack):
                raise PointOutOfInterval(
                    f"points leave interval [{lo}, {hi}]: "
                    f"range [{pts.min()}, {pts.max()}]"
                )
            object.__setattr__(self, "interval", (lo, hi))
        pts = pts.copy()
        wts = wts.copy()
        pts.setflags(write=False)
        wts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @property
    def size(self) -> int:
        return int(self.points.size)

    @property
    def weight_sum(self) -> float:
        return float(math.fsum(self.weights))


@dataclass(frozen=True)
class StochasticMatrix:
    """A validated row-, column-, or doubly stochastic matrix.

    Entries in ``[-1e-14, 0)`` are clamped to zero on construction;
    anything more negative is rejected.  The relevant sums must equal
    one within ``1e-12``.

    Attributes:
        entries: The matrix, stored read-only.
        kind: ``"row"``, ``"column"``, or ``"doubly"``.
    """

    entries: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ("row", "column", "doubly"):
            raise ValidationError(f"kind must be row, column, or doubly, got {self.kind!r}")
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError(f"matrix must be two-dimensional and nonempty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("matrix entries must be finite")
        low = arr.min()
        if low < -ENTRY_CLAMP_TOL:
            raise ValidationError(f"matrix entry {low} below clamping tolerance -{ENTRY_CLAMP_TOL}")
        arr = np.where(arr < 0.0, 0.0, arr)
        if self.kind in ("row", "doubly"):
            dev = float(np.abs(arr.sum(axis=1) - 1.0).max())
            if dev > MATRIX_SUM_TOL:
                raise ValidationError(f"row sums deviate from 1 by {dev} > {MATRIX_SUM_TOL}")
        if self.kind in ("column", "doubly"):
            dev = float(np.abs(arr.sum(axis=0) - 1.0).max())
            if dev > MATRIX_SUM_TOL:
                raise ValidationError(f"column sums deviate from 1 by {dev} > {MATRIX_SUM_TOL}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self.entries.shape)


@dataclass(frozen=True)
class MajorizationCert:
    """Certificate returned by :func:`majorizes`.

    Attributes:
        relation: ``"holds"`` or ``"fails"``.
        witness_k: On failure, the smallest prefix length whose partial
            sums violate the relation; the full length signals a total-sum
            mismatch.  None when the relation holds.
        matrix: Doubly stochastic witness with ``y = A x`` when requested.
    """

    relation: str
    witness_k: Optional[int]
    matrix: Optional[StochasticMatrix]

    @property
    def holds(self) -> bool:
        return self.relation == "holds"


def majorizes(x, y, tol: float = DEFAULT_TOL, *, with_matrix: bool = False) -> MajorizationCert:
    """Check whether ``x`` majorizes ``y`` (``y ≺ x``).

    Both vectors are sorted in decreasing order; the relation holds when
    every prefix sum of ``y`` stays below the matching prefix sum of
    ``x`` plus ``tol`` and the totals agree within ``tol``.

    Args:
        x: Candidate majorant.
        y: Candidate majorized vector, same length.
        tol: Absolute slack for the partial-sum comparisons.
        with_matrix: When True and the relation holds, attach a doubly
            stochastic matrix ``A`` with ``y = A x``.

    Raises:
        LengthMismatch: if the vectors differ in length.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.ndim != 1 or ya.ndim != 1 or xa.size != ya.size or xa.size == 0:
        raise LengthMismatch(
            f"majorization needs equal-length vectors, got shapes {xa.shape} and {ya.shape}"
        )
    cx = np.cumsum(np.sort(xa)[::-1])
    cy = np.cumsum(np.sort(ya)[::-1])
    m = xa.size
    for k in range(m - 1):
        if cy[k] > cx[k] + tol:
            return MajorizationCert("fails", k + 1, None)
    if abs(cx[-1] - cy[-1]) > tol:
        return MajorizationCert("fails", m, None)
    matrix = construct_doubly_stochastic(xa, ya, tol) if with_matrix else None
    return MajorizationCert("holds", None, matrix)


def construct_doubly_stochastic(x, y, tol: float = DEFAULT_TOL) -> StochasticMatrix:
    """Build a doubly stochastic ``A`` with ``y = A x`` for a majorized pair.

    Classical construction: sort both vectors in decreasing order, then
    apply at most ``m - 1`` T-transforms (convex mixtures of the identity
    and a transposition), each matching at least one more coordinate of
    the working vector to ``y``.  Sorting permutations are undone at the
    end, so ``A`` refers to the original coordinate order.

    Args:
        x: Majorant vector.
        y: Majorized vector (``y ≺ x`` within ``tol``).
        tol: Tolerance forwarded to the majorization check.

    Returns:
        The witness as a validated doubly stochastic matrix with
        ``max_i |y_i - (A x)_i| <= 1e-10``.

    Raises:
        NotMajorized: if the pair fails the majorization check, or if the
            inputs are so far from exact majorization that the residual
            target is unreachable.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    cert = majorizes(xa, ya, tol)
    if not cert.holds:
        raise NotMajorized(f"pair fails majorization at prefix {cert.witness_k}")
    m = xa.size
    ordx = np.argsort(-xa, kind="stable")
    ordy = np.argsort(-ya, kind="stable")
    v = xa[ordx].copy()
    target = ya[ordy]
    work = np.eye(m)
    scale = max(1.0, float(np.abs(xa).max()))
    eps = 1e-13 * scale
    for _ in range(m - 1):
        diff = v - target
        high = np.nonzero(diff > eps)[0]
        if high.size == 0:
            break
        j = int(high[0])
        low = np.nonzero(diff[j + 1 :] < -eps)[0]
        if low.size == 0:
            break
        k = j + 1 + int(low[0])
        delta = min(v[j] - target[j], target[k] - v[k])
        lam = delta / (v[j] - v[k])  # v[j] > target[j] >= target[k] > v[k]
        step = np.eye(m)
        step[j, j] = 1.0 - lam
        step[j, k] = lam
        step[k, k] = 1.0 - lam
        step[k, j] = lam
        work = step @ work
        v = step @ v
    perm_x = np.eye(m)[ordx]
    perm_y = np.eye(m)[ordy]
    matrix = perm_y.T @ work @ perm_x
    residual = float(np.abs(ya - matrix @ xa).max())
    if residual > 1e-10:
        raise NotMajorized(
            f"construction residual {residual} exceeds 1e-10; "
            "pair is not majorized to working precision"
        )
    return StochasticMatrix(matrix, "doubly")


@dataclass(frozen=True)
class VerificationResult:
    """Residuals of a weighted-majorization witness check.

    Attributes:
        passed: True when both residuals fall within ``tol``.
        weight_residual: ``max_j |a_j - (b A)_j|``.
        point_residual: ``max_i |y_i - (A x)_i|``.
        tol: Tolerance the residuals were compared against.
    """

    passed: bool
    weight_residual: float
    point_residual: float
    tol: float


def verify_weighted_majorization(
    x: WeightedVector, y: WeightedVector, matrix: StochasticMatrix, tol: float = DEFAULT_TOL
) -> VerificationResult:
    """Check that ``matrix`` witnesses weighted majorization of ``(y, b)`` by ``(x, a)``.

    The witness must be row-stochastic (doubly stochastic also qualifies)
    with shape ``(len(y), len(x))`` and satisfy ``a = b A`` and
    ``y = A x`` within ``tol`` in the max norm.

    Raises:
        ValidationError: if ``matrix`` is only column-stochastic.
        DimensionMismatch: if the shape does not match the vectors.
    """
    if matrix.kind == "column":
        raise ValidationError("weighted majorization needs a row-stochastic witness")
    rows, cols = matrix.shape
    if y.size != rows or x.size != cols:
        raise DimensionMismatch(
            f"witness shape {matrix.shape} incompatible with sizes ({y.size}, {x.size})"
        )
    weight_residual = float(np.abs(x.weights - y.weights @ matrix.entries).max())
    point_residual = float(np.abs(y.points - matrix.entries @ x.points).max())
    return VerificationResult(
        passed=weight_residual <= tol and point_residual <= tol,
        weight_residual=weight_residual,
        point_residual=point_residual,
        tol=tol,
    )


def generate_weighted_pair(x, b, matrix: StochasticMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Generate ``(y, a)`` so that ``(y, b)`` is weighted-majorized by ``(x, a)``.

    Sets ``y = A x`` and ``a = b A``; the result passes
    :func:`verify_weighted_majorization` at tolerance ``1e-12`` by
    construction.

    Raises:
        ValidationError: if ``matrix`` is only column-stochastic, or ``b``
            has negative entries.
        DimensionMismatch: if the shape does not match ``x`` and ``b``.
    """
    if matrix.kind == "column":
        raise ValidationError("weighted pair generation needs a row-stochastic matrix")
    xa = _as_vector(x, "x")
    ba = _as_vector(b, "b")
    if np.any(ba < 0.0):
        raise ValidationError("weights must be nonnegative")
    rows, cols = matrix.shape
    if ba.size != rows or xa.size != cols:
        raise DimensionMismatch(
            f"matrix shape {matrix.shape} incompatible with sizes ({ba.size}, {xa.size})"
        )
    return matrix.entries @ xa, ba @ matrix.entries
