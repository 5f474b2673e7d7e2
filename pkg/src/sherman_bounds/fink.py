"""Identity-based representations of f and of Sherman-type differences.

For an n-times differentiable ``f`` on ``[alpha, beta]`` the n-th order
two-point Taylor-like identity (Fink's identity) represents ``f(x)``
through the interval mean of ``f``, endpoint derivatives up to order
``n - 2``, and one weighted integral of ``f^(n)`` against the kernel
``(x - t)^(n-1) * k(t, x)`` with::

    k(t, x) = t - alpha  if t <= x,   t - beta  otherwise.

Summing the identity over a weighted-majorized pair cancels the mean and
first-order terms and yields an exact representation of the difference
``S_a f(x) - S_b f(y)``; dropping the integral gives computable bounds
whenever the combined kernel weight has one sign on the interval, which
holds in particular for even ``n`` on verified pairs.  Applying that to
the shift ``g = f - c*t^n`` of an n-strongly convex ``f`` produces the
higher-order analogue of the quadratically corrected bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import quad

from .convexity import (
    FunctionSpec,
    is_n_convex,
    is_n_strongly_convex,
    shift_to_convex,
)
from .errors import (
    KernelConditionIndefinite,
    MajorizationNotVerified,
    ModulusNotCertified,
    OutOfInterval,
    QuadratureFailure,
)
from .majorization import WeightedVector

#: Sign classification threshold for the combined kernel weight.
KERNEL_SIGN_TOL = 1e-12

#: Default number of grid nodes for the kernel sign scan.
DEFAULT_KERNEL_GRID = 1001

#: Residual slack for the higher-order bound verdict.
BOUND_SLACK = 1e-9


@dataclass(frozen=True, slots=True)
class QuadratureConfig:
    """Tolerances and budget for the adaptive integrator.

    Attributes:
        abs_tol: Total absolute error budget, split across smooth pieces.
        rel_tol: Relative error target per piece.
        max_subdivisions: Subdivision limit per piece.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


def fink_kernel(t: float, x: float, alpha: float, beta: float) -> float:
    """The two-branch kernel ``t - alpha`` (for ``t <= x``) or ``t - beta``.

    Raises:
        OutOfInterval: if ``t`` or ``x`` leaves ``[alpha, beta]``.
    """
    slack = 1e-12 * max(1.0, abs(alpha), abs(beta))
    if not (alpha - slack <= t <= beta + slack):
        raise OutOfInterval(f"t={t} outside [{alpha}, {beta}]")
    if not (alpha - slack <= x <= beta + slack):
        raise OutOfInterval(f"x={x} outside [{alpha}, {beta}]")
    return t - alpha if t <= x else t - beta


def _integrate_pieces(fn, cuts: np.ndarray, cfg: QuadratureConfig) -> float:
    """Integrate ``fn`` over consecutive pieces, budgeting abs_tol across them."""
    pieces = [
        (float(cuts[i]), float(cuts[i + 1]))
        for i in range(len(cuts) - 1)
        if cuts[i + 1] > cuts[i]
    ]
    if not pieces:
        return 0.0
    per_piece = cfg.abs_tol / len(pieces)
    total = 0.0
    err_total = 0.0
    for lo, hi in pieces:
        out = quad(
            fn,
            lo,
            hi,
            epsabs=per_piece,
            epsrel=cfg.rel_tol,
            limit=cfg.max_subdivisions,
            full_output=1,
        )
        if len(out) == 4:
            raise QuadratureFailure(f"integration on [{lo}, {hi}] failed: {out[3].strip()}")
        total += out[0]
        err_total += out[1]
    if err_total > max(10.0 * cfg.abs_tol, 10.0 * cfg.rel_tol * abs(total)):
        raise QuadratureFailure(
            f"integration error estimate {err_total} exceeds budget {cfg.abs_tol}"
        )
    return total


def _interior_cuts(alpha: float, beta: float, interior) -> np.ndarray:
    pts = np.asarray(interior, dtype=float)
    pts = pts[(pts > alpha) & (pts < beta)]
    return np.unique(np.concatenate([[alpha], pts, [beta]]))


def fink_identity_check(
    spec: FunctionSpec,
    x: float,
    n: int,
    quad_cfg: QuadratureConfig = QuadratureConfig(),
) -> float:
    """Residual of the n-th order identity at one point.

    Evaluates ``f(x)`` minus the identity's right-hand side (interval
    mean, endpoint-derivative sum, kernel integral of ``f^(n)``); the
    result should vanish up to quadrature error.

    Raises:
        MissingDerivative: if derivatives up to order ``n`` are missing.
        PointOutOfInterval: if ``x`` leaves the interval.
        QuadratureFailure: if the integrator gives up.
    """
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    spec.require_inside([x])
    spec.derivative(n)  # fail fast if unavailable
    al, be = spec.interval
    width = be - al
    f = spec.evaluator
    x = float(x)

    mean_term = n / width * _integrate_pieces(f, np.array([al, be]), quad_cfg)
    boundary = 0.0
    for w in range(1, n):
        dw = spec.derivative(w - 1)
        boundary += (
            (n - w)
            / math.factorial(w)
            * (dw(al) * (x - al) ** w - dw(be) * (x - be) ** w)
            / width
        )
    fn = spec.derivative(n)

    def integrand(t: float) -> float:
        return (x - t) ** (n - 1) * fink_kernel(t, x, al, be) * fn(t)

    kernel_term = _integrate_pieces(integrand, _interior_cuts(al, be, [x]), quad_cfg) / (
        math.factorial(n - 1) * width
    )
    return f(x) - (mean_term - boundary + kernel_term)


@dataclass(frozen=True, slots=True)
class KernelCondition:
    """Sign scan of the combined kernel weight over the interval.

    Attributes:
        classification: ``"nonnegative"``, ``"nonpositive"``, or
            ``"indefinite"`` at tolerance :data:`KERNEL_SIGN_TOL`.
        min_value: Smallest weight seen on the scan grid.
        max_value: Largest weight seen on the scan grid.
        grid_size: Number of evenly spaced scan nodes requested.
    """

    classification: str
    min_value: float
    max_value: float
    grid_size: int


def _kernel_weight_on_grid(
    t: np.ndarray,
    x: WeightedVector,
    y: WeightedVector,
    n: int,
    alpha: float,
    beta: float,
    *,
    right_limit: bool = False,
) -> np.ndarray:
    tc = t[:, None]

    def side(v: WeightedVector) -> np.ndarray:
        pts = v.points[None, :]
        branch = tc < pts if right_limit else tc <= pts
        kern = np.where(branch, tc - alpha, tc - beta)
        return ((pts - tc) ** (n - 1) * kern) @ v.weights

    return side(x) - side(y)


def check_kernel_condition(
    x: WeightedVector,
    y: WeightedVector,
    n: int,
    t_grid_size: int = DEFAULT_KERNEL_GRID,
    *,
    interval: Optional[tuple[float, float]] = None,
) -> KernelCondition:
    """Classify the sign of the combined kernel weight for a pair.

    The weight ``W(t) = S_a (x-t)^(n-1) k(t,x) - S_b (y-t)^(n-1) k(t,y)``
    is scanned on an even grid joined with every data point, where both
    the value and the right limit are inspected (the kernel jumps there).
    A one-signed weight is what turns the difference identity into a
    bound.

    Args:
        x: Majorant side.
        y: Majorized side.
        n: Identity order (the kernel uses the ``n-1`` power).
        t_grid_size: Number of evenly spaced scan nodes.
        interval: Scan interval; defaults to the hull of the data points.
    """
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    if t_grid_size < 2:
        raise ValueError(f"t_grid_size must be >= 2, got {t_grid_size}")
    if interval is None:
        lo = float(min(x.points.min(), y.points.min()))
        hi = float(max(x.points.max(), y.points.max()))
    else:
        lo, hi = float(interval[0]), float(interval[1])
    breaks = np.concatenate([x.points, y.points])
    breaks = breaks[(breaks >= lo) & (breaks <= hi)]
    grid = np.unique(np.concatenate([np.linspace(lo, hi, t_grid_size), breaks]))
    values = _kernel_weight_on_grid(grid, x, y, n, lo, hi)
    right = _kernel_weight_on_grid(breaks, x, y, n, lo, hi, right_limit=True)
    lo_val = float(min(values.min(), right.min())) if right.size else float(values.min())
    hi_val = float(max(values.max(), right.max())) if right.size else float(values.max())
    if lo_val >= -KERNEL_SIGN_TOL:
        label = "nonnegative"
    elif hi_val <= KERNEL_SIGN_TOL:
        label = "nonpositive"
    else:
        label = "indefinite"
    return KernelCondition(label, lo_val, hi_val, t_grid_size)


@dataclass(frozen=True, slots=True)
class FinkReport:
    """Exact decomposition of a Sherman-type difference.

    ``lhs = boundary_terms + integral_term + residual`` with residual at
    quadrature-noise level when the identity applies.

    Attributes:
        order: Identity order ``n``.
        lhs: ``S_a f(x) - S_b f(y)``.
        boundary_terms: Endpoint-derivative sum (orders 1..n-2).
        integral_term: Kernel integral of ``f^(n)``.
        residual: ``lhs - boundary_terms - integral_term``.
        kernel_condition: Sign classification of the kernel weight.
    """

    order: int
    lhs: float
    boundary_terms: float
    integral_term: float
    residual: float
    kernel_condition: str

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "lhs": self.lhs,
            "boundary_terms": self.boundary_terms,
            "integral_term": self.integral_term,
            "residual": self.residual,
            "kernel_condition": self.kernel_condition,
        }


def sherman_difference_identity(
    x: WeightedVector,
    y: WeightedVector,
    spec: FunctionSpec,
    n: int,
    quad_cfg: QuadratureConfig = QuadratureConfig(),
    *,
    kernel_grid_size: int = DEFAULT_KERNEL_GRID,
) -> FinkReport:
    """Decompose ``S_a f(x) - S_b f(y)`` by the n-th order identity.

    Requires the two moment conditions that weighted majorization
    guarantees, ``S_a 1 = S_b 1`` and ``S_a x = S_b y``; under them the
    interval-mean and first-order endpoint terms cancel exactly and::

        lhs = sum_{w=2}^{n-1} (n-w)/w! * [f^(w-1)(beta) S_w(beta)
                                          - f^(w-1)(alpha) S_w(alpha)]
                / (beta - alpha)
              + integral of W(t) f^(n)(t) / ((n-1)! (beta - alpha))

    with ``S_w(z) = S_a (x-z)^w - S_b (y-z)^w`` and ``W`` the combined
    kernel weight.

    Raises:
        MajorizationNotVerified: if either moment condition fails.
        MissingDerivative: if derivatives up to order ``n`` are missing.
        QuadratureFailure: if the integrator gives up.
    """
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    spec.require_inside(x.points)
    spec.require_inside(y.points)
    spec.derivative(n)  # fail fast if unavailable
    al, be = spec.interval
    width = be - al

    sa = math.fsum(x.weights)
    sb = math.fsum(y.weights)
    max1 = math.fsum(w * p for w, p in zip(x.weights, x.points))
    may1 = math.fsum(w * p for w, p in zip(y.weights, y.points))
    guard = 1e-9 * max(1.0, abs(sa), abs(max1))
    if abs(sa - sb) > guard:
        raise MajorizationNotVerified(f"total weights differ: {sa} vs {sb}")
    if abs(max1 - may1) > guard:
        raise MajorizationNotVerified(f"first moments differ: {max1} vs {may1}")

    fx = np.array([spec.evaluator(float(t)) for t in x.points])
    fy = np.array([spec.evaluator(float(t)) for t in y.points])
    lhs = float(x.weights @ fx) - float(y.weights @ fy)

    boundary = 0.0
    for w in range(2, n):
        dw = spec.derivative(w - 1)
        s_beta = float(x.weights @ (x.points - be) ** w) - float(y.weights @ (y.points - be) ** w)
        s_alpha = float(x.weights @ (x.points - al) ** w) - float(y.weights @ (y.points - al) ** w)
        boundary += (n - w) / math.factorial(w) * (dw(be) * s_beta - dw(al) * s_alpha) / width

    fn = spec.derivative(n)

    def integrand(t: float) -> float:
        arr = np.array([t])
        return float(_kernel_weight_on_grid(arr, x, y, n, al, be)[0]) * fn(t)

    cuts = _interior_cuts(al, be, np.concatenate([x.points, y.points]))
    integral = _integrate_pieces(integrand, cuts, quad_cfg) / (math.factorial(n - 1) * width)

    condition = check_kernel_condition(
        x, y, n, kernel_grid_size, interval=spec.interval
    ).classification
    return FinkReport(
        order=n,
        lhs=lhs,
        boundary_terms=boundary,
        integral_term=integral,
        residual=lhs - boundary - integral,
        kernel_condition=condition,
    )


class HigherOrderBound(NamedTuple):
    """Higher-order one-sided bound derived from the difference identity.

    For a nonnegative kernel weight the claim is
    ``lhs_with_correction >= rhs_boundary`` (reversed for nonpositive),
    where ``lhs_with_correction`` is the difference of the shifted
    function ``g = f - c*t^n`` and ``rhs_boundary`` its endpoint sum.
    """

    lhs_with_correction: float
    rhs_boundary: float
    holds: bool
    kernel_condition: str


def higher_order_sherman_bound(
    x: WeightedVector,
    y: WeightedVector,
    spec: FunctionSpec,
    n: int,
    c: float,
    quad_cfg: QuadratureConfig = QuadratureConfig(),
    *,
    kernel_grid_size: int = DEFAULT_KERNEL_GRID,
    sample_count: int = 200,
    seed: int = 0,
    unchecked_modulus: bool = False,
) -> HigherOrderBound:
    """Bound the Sherman difference through the order-n identity.

    The modulus claim (``f`` n-strongly convex with modulus ``c``; plain
    n-convexity for ``c = 0``) is screened by sampled divided differences
    unless ``unchecked_modulus`` is set.  The kernel weight of the pair
    must be one-signed on the interval; dropping the integral of
    ``g^(n) >= 0`` against it then leaves a valid inequality between the
    shifted difference and its endpoint-derivative sum.

    Raises:
        KernelConditionIndefinite: if the kernel weight changes sign.
        ModulusNotCertified: if sampling refutes the modulus claim.
        MajorizationNotVerified: per :func:`sherman_difference_identity`.
        QuadratureFailure: if the integrator gives up.
    """
    if c < 0:
        raise ValueError(f"modulus must be nonnegative, got {c}")
    condition = check_kernel_condition(x, y, n, kernel_grid_size, interval=spec.interval)
    if condition.classification == "indefinite":
        raise KernelConditionIndefinite(
            f"kernel weight spans [{condition.min_value}, {condition.max_value}]; "
            "no one-sided bound follows"
        )
    if not unchecked_modulus:
        if c > 0:
            verdict = is_n_strongly_convex(spec, n, c, sample_count, seed)
        else:
            verdict = is_n_convex(spec, n, sample_count, seed)
        if not verdict.passed:
            raise ModulusNotCertified(
                f"sampling refutes modulus {c} at order {n}: divided difference "
                f"{verdict.worst_value} at nodes {verdict.witness}"
            )
    shifted = shift_to_convex(spec, n, c)
    report = sherman_difference_identity(
        x, y, shifted, n, quad_cfg, kernel_grid_size=kernel_grid_size
    )
    if condition.classification == "nonnegative":
        holds = report.lhs >= report.boundary_terms - BOUND_SLACK
    else:
        holds = report.lhs <= report.boundary_terms + BOUND_SLACK
    return HigherOrderBound(
        lhs_with_correction=report.lhs,
        rhs_boundary=report.boundary_terms,
        holds=holds,
        kernel_condition=condition.classification,
    )
