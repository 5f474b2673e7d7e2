"""Function specs, divided differences, and n-convexity certification.

A function enters the package as a :class:`FunctionSpec`: an evaluator, a
tuple of derivative evaluators, and the closed interval the function is
defined on.  On top of that this module provides

* divided differences with repeated nodes (``[z,...,z; f]`` of ``j+1``
  copies resolves to ``f^(j)(z)/j!``),
* grid certification of the strong-convexity modulus of order ``n``
  (the largest ``c`` with ``f^(n) >= c * n!`` on the interval, i.e. the
  largest ``c`` such that ``f(t) - c*t^n`` stays n-convex),
* one-sided sampling checks of n-convexity via random divided
  differences, and
* the shift ``f -> f - c*t^n`` that turns an n-strongly convex function
  into a plain n-convex one.

A named catalog of common functions (``square``, ``exp``, ``xlogx``,
``neg_log``, ``linear``, ``pow:a``) supports the command line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    DegenerateInterval,
    EmptyPoints,
    MissingDerivative,
    PointOutOfInterval,
    ValidationError,
)

Evaluator = Callable[[float], float]

#: Divided differences this close to zero (or to the modulus) count as ties.
DIVIDED_DIFFERENCE_TOL = 1e-10

#: Default number of grid nodes for modulus certification.
DEFAULT_MODULUS_GRID = 10001

#: Default number of random node tuples drawn by the sampling checks.
DEFAULT_SAMPLE_COUNT = 200

#: Highest derivative order the built-in catalog provides.
CATALOG_ORDER = 6


@dataclass(frozen=True, slots=True)
class FunctionSpec:
    """A real function on a closed interval, with optional derivatives.

    Attributes:
        name: Human-readable identifier used in reports and error messages.
        evaluator: Callable returning ``f(t)`` for ``t`` in ``interval``.
        derivatives: Tuple of callables; ``derivatives[k-1]`` evaluates
            the k-th derivative.  May be empty.
        interval: Closed interval ``(alpha, beta)`` with ``alpha < beta``.
    """

    name: str
    evaluator: Evaluator
    derivatives: tuple[Evaluator, ...]
    interval: tuple[float, float]

    def __post_init__(self) -> None:
        lo, hi = float(self.interval[0]), float(self.interval[1])
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DegenerateInterval(f"interval bounds must be finite, got {self.interval}")
        if not lo < hi:
            raise DegenerateInterval(f"interval must satisfy alpha < beta, got {self.interval}")
        object.__setattr__(self, "derivatives", tuple(self.derivatives))
        object.__setattr__(self, "interval", (lo, hi))

    @property
    def alpha(self) -> float:
        return self.interval[0]

    @property
    def beta(self) -> float:
        return self.interval[1]

    @property
    def max_order(self) -> int:
        """Highest derivative order available (0 = evaluator only)."""
        return len(self.derivatives)

    def derivative(self, order: int) -> Evaluator:
        """Return the evaluator of the given derivative order.

        Order 0 returns the function itself.

        Raises:
            MissingDerivative: if the spec does not carry that order.
        """
        if order == 0:
            return self.evaluator
        if order < 0 or order > len(self.derivatives):
            raise MissingDerivative(
                f"{self.name}: derivative of order {order} requested, "
                f"only orders 0..{len(self.derivatives)} available"
            )
        return self.derivatives[order - 1]

    def require_inside(self, points) -> None:
        """Raise :class:`PointOutOfInterval` unless all points lie in the interval.

        A relative slack of ``1e-12`` absorbs representation rounding.
        """
        lo, hi = self.interval
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        for t in np.atleast_1d(np.asarray(points, dtype=float)):
            if not (lo - slack <= t <= hi + slack):
                raise PointOutOfInterval(
                    f"point {t!r} outside interval [{lo}, {hi}] of {self.name}"
                )


def divided_difference(points, spec: FunctionSpec) -> float:
    """Divided difference of ``spec`` over the given nodes.

    Nodes are sorted first, so the result is symmetric in the arguments
    by construction.  Exactly equal nodes are treated as confluent:
    a run of ``j+1`` equal nodes contributes ``f^(j)(z)/j!`` wherever the
    recursion hits a zero denominator, which requires derivatives up to
    the run length minus one.

    Args:
        points: One or more nodes inside ``spec.interval``.
        spec: Function with enough derivatives for any coincident runs.

    Returns:
        The divided difference ``[points; f]``.

    Raises:
        EmptyPoints: if no nodes are given.
        PointOutOfInterval: if a node leaves the interval.
        MissingDerivative: if coincident nodes need an unavailable order.
    """
    pts = sorted(float(p) for p in np.atleast_1d(np.asarray(points, dtype=float)))
    if not pts:
        raise EmptyPoints("divided_difference needs at least one node")
    spec.require_inside(pts)
    col = [spec.evaluator(p) for p in pts]
    n = len(pts)
    for j in range(1, n):
        nxt = []
        for i in range(n - j):
            lo, hi = pts[i], pts[i + j]
            if hi == lo:
                # j+1 coincident copies of lo: confluent limit f^(j)(lo)/j!
                if spec.max_order < j:
                    raise MissingDerivative(
                        f"{j + 1} coincident nodes at {lo} need derivative "
                        f"order {j}; {spec.name} provides {spec.max_order}"
                    )
                nxt.append(spec.derivative(j)(lo) / math.factorial(j))
            else:
                nxt.append((col[i + 1] - col[i]) / (hi - lo))
        col = nxt
    return col[0]


@dataclass(frozen=True, slots=True)
class ModulusCertificate:
    """Outcome of grid certification of a strong-convexity modulus.

    Attributes:
        order: Convexity order ``n`` the certificate refers to.
        modulus: Certified modulus, ``max(0, min f^(n)/n! over the grid)``.
        grid_size: Number of grid nodes inspected (endpoints included).
        verdict: ``"certified"`` when the grid minimum is nonnegative,
            ``"failed"`` when it is negative (then ``modulus == 0``),
            ``"indeterminate"`` when a non-finite value appeared.
        grid_min: Raw grid minimum of ``f^(n)/n!`` (NaN if indeterminate).
    """

    order: int
    modulus: float
    grid_size: int
    verdict: str
    grid_min: float


def estimate_strong_modulus(
    spec: FunctionSpec, n: int, grid_size: int = DEFAULT_MODULUS_GRID
) -> ModulusCertificate:
    """Certify a modulus of n-strong convexity from an endpoint-inclusive grid.

    The returned modulus is ``max(0, min f^(n)(t)/n!)`` over ``grid_size``
    evenly spaced nodes.  For functions whose n-th derivative is monotone
    or has interior minima resolved by the grid this equals the exact
    modulus up to grid resolution; it is a certificate in the sense that
    the sampled divided-difference checks accept any ``c`` at or below it.

    Raises:
        MissingDerivative: if ``spec`` lacks the n-th derivative.
        ValueError: on ``n < 1`` or ``grid_size < 2``.
    """
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    deriv = spec.derivative(n)
    fact = float(math.factorial(n))
    grid = np.linspace(spec.alpha, spec.beta, grid_size)
    vals = np.array([deriv(float(t)) for t in grid], dtype=float) / fact
    if not np.all(np.isfinite(vals)):
        return ModulusCertificate(n, 0.0, grid_size, "indeterminate", float("nan"))
    gmin = float(vals.min())
    verdict = "certified" if gmin >= 0.0 else "failed"
    return ModulusCertificate(n, max(0.0, gmin), grid_size, verdict, gmin)


@dataclass(frozen=True, slots=True)
class SampleVerdict:
    """Result of a sampled divided-difference check.

    ``passed`` verdicts are one-sided: sampling can refute a convexity
    claim (the witness tuple is a counterexample) but never prove it.

    Attributes:
        passed: True when no sampled tuple fell below the threshold.
        witness: Worst offending node tuple when the check failed.
        worst_value: Smallest divided difference seen.
        samples: Number of tuples drawn.
        threshold: Acceptance threshold the values were compared against.
    """

    passed: bool
    witness: Optional[tuple[float, ...]]
    worst_value: float
    samples: int
    threshold: float


def _stratified_nodes(rng: np.random.Generator, lo: float, hi: float, count: int):
    # One node per equal-width stratum, kept 10% away from stratum edges:
    # enforces pairwise gaps >= 0.2*(hi-lo)/count so the divided-difference
    # table stays well conditioned near a zero of [z_0..z_n; f] - c.
    width = (hi - lo) / count
    pad = 0.1 * width
    return tuple(
        float(rng.uniform(lo + i * width + pad, lo + (i + 1) * width - pad))
        for i in range(count)
    )


def _sampled_verdict(
    spec: FunctionSpec, n: int, c: float, sample_count: int, seed: int
) -> SampleVerdict:
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    if sample_count < 1:
        raise ValueError(f"sample_count must be >= 1, got {sample_count}")
    threshold = c - DIVIDED_DIFFERENCE_TOL
    rng = np.random.default_rng(seed)
    worst = math.inf
    worst_pts: Optional[tuple[float, ...]] = None
    for _ in range(sample_count):
        pts = _stratified_nodes(rng, spec.alpha, spec.beta, n + 1)
        val = divided_difference(pts, spec)
        if val < worst:
            worst = val
            worst_pts = pts
    passed = worst >= threshold
    return SampleVerdict(
        passed=passed,
        witness=None if passed else worst_pts,
        worst_value=worst,
        samples=sample_count,
        threshold=threshold,
    )


def is_n_convex(
    spec: FunctionSpec,
    n: int,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    seed: int = 0,
) -> SampleVerdict:
    """Sample random node tuples and test ``[z_0..z_n; f] >= -1e-10``.

    Nodes are drawn one per stratum of the interval, so tuples stay well
    separated and rounding in the divided-difference table cannot fake a
    violation for a genuinely n-convex function.
    """
    return _sampled_verdict(spec, n, 0.0, sample_count, seed)


def is_n_strongly_convex(
    spec: FunctionSpec,
    n: int,
    c: float,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    seed: int = 0,
) -> SampleVerdict:
    """Sample random node tuples and test ``[z_0..z_n; f] >= c - 1e-10``."""
    if c < 0:
        raise ValueError(f"modulus must be nonnegative, got {c}")
    return _sampled_verdict(spec, n, c, sample_count, seed)


def shift_to_convex(spec: FunctionSpec, n: int, c: float) -> FunctionSpec:
    """Return the spec of ``g(t) = f(t) - c*t^n`` on the same interval.

    ``g`` is n-convex exactly when ``f`` is n-strongly convex with
    modulus ``c``.  Derivatives carry over: order ``k <= n`` subtracts
    ``c * n!/(n-k)! * t^(n-k)``, orders above ``n`` are unchanged.
    """
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    if c < 0:
        raise ValueError(f"modulus must be nonnegative, got {c}")
    f = spec.evaluator

    def g(t: float, _f=f, _c=c, _n=n) -> float:
        return _f(t) - _c * t**_n

    derivs: list[Evaluator] = []
    for k in range(1, spec.max_order + 1):
        fk = spec.derivative(k)
        if k <= n:
            coeff = c * math.factorial(n) / math.factorial(n - k)
            power = n - k

            def gk(t: float, _fk=fk, _coeff=coeff, _p=power) -> float:
                return _fk(t) - _coeff * t**_p

            derivs.append(gk)
        else:
            derivs.append(fk)
    return FunctionSpec(
        name=f"{spec.name}-{c:g}*t^{n}",
        evaluator=g,
        derivatives=tuple(derivs),
        interval=spec.interval,
    )


def check_derivative_consistency(
    spec: FunctionSpec, grid_size: int = 33, rel_tol: float = 1e-5
) -> bool:
    """Self-test each derivative against central differences of the previous one.

    Uses step ``h = (beta-alpha)*1e-5`` on an interior grid and accepts
    when ``|central - exact| <= rel_tol * (|exact| + 1)`` everywhere.
    Intended as a sanity check for hand-written derivative tuples.
    """
    lo, hi = spec.interval
    h = (hi - lo) * 1e-5
    ts = np.linspace(lo + 2.0 * h, hi - 2.0 * h, grid_size)
    for k in range(1, spec.max_order + 1):
        fk = spec.derivative(k)
        fprev = spec.derivative(k - 1)
        for t in ts:
            t = float(t)
            approx = (fprev(t + h) - fprev(t - h)) / (2.0 * h)
            exact = fk(t)
            if abs(approx - exact) > rel_tol * (abs(exact) + 1.0):
                return False
    return True


def _falling_factorial(a: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= a - i
    return out


def _power_spec(name: str, exponent: float, interval, order: int) -> FunctionSpec:
    lo, _ = float(interval[0]), float(interval[1])
    is_integer = float(exponent).is_integer() and exponent >= 0
    if not is_integer and lo <= 0.0:
        raise ValidationError(
            f"{name} with non-integer exponent {exponent} needs a positive interval"
        )

    def ev(t: float, _a=exponent) -> float:
        return t**_a

    derivs: list[Evaluator] = []
    for k in range(1, order + 1):
        coeff = _falling_factorial(exponent, k)

        def dk(t: float, _c=coeff, _p=exponent - k) -> float:
            if _c == 0.0:
                return 0.0
            return _c * t**_p

        derivs.append(dk)
    return FunctionSpec(name=name, evaluator=ev, derivatives=tuple(derivs), interval=tuple(interval))


def _exp_spec(interval, order: int) -> FunctionSpec:
    derivs = tuple(math.exp for _ in range(order))
    return FunctionSpec(name="exp", evaluator=math.exp, derivatives=derivs, interval=tuple(interval))


def _xlogx_spec(interval, order: int) -> FunctionSpec:
    lo, _ = float(interval[0]), float(interval[1])
    if lo <= 0.0:
        raise ValidationError("xlogx needs a positive interval")

    def ev(t: float) -> float:
        return t * math.log(t)

    def d1(t: float) -> float:
        return math.log(t) + 1.0

    derivs: list[Evaluator] = [d1]
    for k in range(2, order + 1):
        # k-th derivative: (-1)^k (k-2)! t^(1-k)
        coeff = (-1.0) ** k * math.factorial(k - 2)

        def dk(t: float, _c=coeff, _p=1 - k) -> float:
            return _c * t**_p

        derivs.append(dk)
    return FunctionSpec(name="xlogx", evaluator=ev, derivatives=tuple(derivs), interval=tuple(interval))


def _neg_log_spec(interval, order: int) -> FunctionSpec:
    lo, _ = float(interval[0]), float(interval[1])
    if lo <= 0.0:
        raise ValidationError("neg_log needs a positive interval")

    def ev(t: float) -> float:
        return -math.log(t)

    derivs: list[Evaluator] = []
    for k in range(1, order + 1):
        # k-th derivative of -log(t): (-1)^k (k-1)! t^(-k)
        coeff = (-1.0) ** k * math.factorial(k - 1)

        def dk(t: float, _c=coeff, _p=-k) -> float:
            return _c * t**_p

        derivs.append(dk)
    return FunctionSpec(name="neg_log", evaluator=ev, derivatives=tuple(derivs), interval=tuple(interval))


def function_from_name(
    name: str, interval: tuple[float, float], order: int = CATALOG_ORDER
) -> FunctionSpec:
    """Build a catalog function by name on the given interval.

    Known names: ``square``, ``exp``, ``xlogx``, ``neg_log``, ``linear``,
    and ``pow:a`` for a float exponent ``a``.  Derivatives are provided
    up to ``order``.

    Raises:
        ValidationError: on an unknown name or an interval the function
            is not defined on.
    """
    key = name.strip().lower()
    if key == "square":
        spec = _power_spec("square", 2.0, interval, order)
        # literal (t-?) free form: keep t*t so the c=1 shift cancels bitwise
        return FunctionSpec(
            name="square",
            evaluator=lambda t: t * t,
            derivatives=spec.derivatives,
            interval=spec.interval,
        )
    if key == "linear":
        return _power_spec("linear", 1.0, interval, order)
    if key == "exp":
        return _exp_spec(interval, order)
    if key == "xlogx":
        return _xlogx_spec(interval, order)
    if key == "neg_log":
        return _neg_log_spec(interval, order)
    if key.startswith("pow:"):
        try:
            exponent = float(key.split(":", 1)[1])
        except ValueError as exc:
            raise ValidationError(f"bad exponent in function name {name!r}") from exc
        return _power_spec(key, exponent, interval, order)
    raise ValidationError(
        f"unknown function {name!r}; known: square, exp, xlogx, neg_log, linear, pow:<a>"
    )
