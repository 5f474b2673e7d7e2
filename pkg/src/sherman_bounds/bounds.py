"""The strongly convex inequality chain around weighted majorization.

For a function ``f`` that is strongly convex with modulus ``c`` on
``[alpha, beta]`` and a weighted-majorized pair ``(y, b) ≺ (x, a)`` the
chain reads, writing ``S_b f(y)`` for ``sum_i b_i f(y_i)`` and so on::

    S_b f(y)  <=  S_a f(x) - c * (S_a x^2 - S_b y^2)   (strong bound)
              <=  S_a f(x)                             (plain bound)
              <=  [(B beta - S_a x) f(alpha) + (S_a x - B alpha) f(beta)]
                    / (beta - alpha)
                  - c * S_a (beta - x)(x - alpha)      (converse bound)

with ``B = sum_i b_i = sum_j a_j``.  Setting ``c = 0`` recovers the
classical majorization and endpoint bounds; a larger certified ``c``
tightens both ends.  The module also exposes the two one-row special
cases (mean-versus-average and the endpoint chord bound) and a
``full_chain`` driver that verifies the majorization witness, resolves
the modulus, and reports every link of the chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .convexity import (
    FunctionSpec,
    ModulusCertificate,
    estimate_strong_modulus,
)
from .errors import (
    DegenerateInterval,
    MajorizationNotVerified,
    ModulusNotCertified,
    WeightsNotNormalized,
)
from .majorization import StochasticMatrix, WeightedVector, verify_weighted_majorization

#: An inequality of the chain counts as violated only beyond this slack.
CHAIN_SLACK = 1e-9

#: Weights meant to be a probability vector may deviate from 1 by this much.
WEIGHT_SUM_TOL = 1e-12

#: Interval width below this is treated as degenerate for endpoint bounds.
MIN_INTERVAL_WIDTH = 1e-14

#: An explicit modulus may exceed the certified one by at most this much.
MODULUS_SLACK = 1e-12


class JensenBound(NamedTuple):
    """Mean-value bound ``f(xbar) <= S_a f(x) - c * S_a (x - xbar)^2``.

    ``variance_term`` is the unscaled weighted spread ``S_a (x - xbar)^2``.
    """

    lhs: float
    rhs: float
    variance_term: float


class LahRibaricBound(NamedTuple):
    """Endpoint chord bound for normalized weights.

    ``lhs = S_a f(x)``; ``rhs`` is the chord value at the weighted mean
    minus ``c * S_a (beta - x)(x - alpha)``.
    """

    lhs: float
    rhs: float


@dataclass(frozen=True)
class BoundChain:
    """Every link of the two-sided chain for one instance.

    Attributes:
        lhs: ``S_b f(y)``.
        strong_bound: ``plain_bound - correction_quadratic``.
        plain_bound: ``S_a f(x)``.
        converse_bound: Endpoint upper bound, None when not requested.
        correction_quadratic: ``c * (S_a x^2 - S_b y^2)``.
        correction_converse: ``c * S_a (beta - x)(x - alpha)``, None when
            the converse was not requested.
        modulus: The strong-convexity modulus used.
        chain_holds: True when every computed link holds within
            :data:`CHAIN_SLACK`.
        fuchs_case: True when both sides have equally many points and all
            weights share one value (the classical equal-weight setting).
        warnings: Human-readable notes (degenerate weights and similar).
    """

    lhs: float
    strong_bound: float
    plain_bound: float
    converse_bound: Optional[float]
    correction_quadratic: float
    correction_converse: Optional[float]
    modulus: float
    chain_holds: bool
    fuchs_case: bool = False
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        """Flat JSON-ready mapping of every field."""
        return {
            "lhs": self.lhs,
            "strong_bound": self.strong_bound,
            "plain_bound": self.plain_bound,
            "converse_bound": self.converse_bound,
            "correction_quadratic": self.correction_quadratic,
            "correction_converse": self.correction_converse,
            "modulus": self.modulus,
            "chain_holds": self.chain_holds,
            "fuchs_case": self.fuchs_case,
            "warnings": list(self.warnings),
        }


def resolve_modulus(
    spec: FunctionSpec,
    c: Optional[float],
    certificate: Optional[ModulusCertificate] = None,
    *,
    unchecked: bool = False,
    order: int = 2,
) -> tuple[float, Optional[ModulusCertificate]]:
    """Resolve the modulus to use for a bound, certifying when needed.

    ``c=None`` auto-certifies (or reuses the given certificate) and uses
    the certified modulus.  An explicit ``c`` may sit anywhere at or
    below the certified value (a smaller modulus only weakens the bound,
    which stays valid); exceeding it raises unless ``unchecked`` is set,
    in which case the caller vouches for ``c`` and no certificate is
    consulted.

    Returns:
        ``(modulus, certificate)``; the certificate is None only on the
        unchecked path when none was supplied.

    Raises:
        ModulusNotCertified: when certification fails or an explicit
            modulus exceeds the certified one.
        ValueError: on a negative explicit modulus.
    """
    if c is not None and c < 0:
        raise ValueError(f"modulus must be nonnegative, got {c}")
    if unchecked:
        if c is None:
            raise ValueError("unchecked modulus requires an explicit value")
        return float(c), certificate
    cert = certificate
    if cert is None:
        cert = estimate_strong_modulus(spec, order)
    if cert.order != order:
        raise ModulusNotCertified(
            f"certificate order {cert.order} does not match required order {order}"
        )
    if cert.verdict != "certified":
        raise ModulusNotCertified(
            f"modulus certification for {spec.name} returned {cert.verdict!r} "
            f"(grid minimum {cert.grid_min})"
        )
    if c is None:
        return cert.modulus, cert
    if c > cert.modulus + MODULUS_SLACK:
        raise ModulusNotCertified(
            f"requested modulus {c} exceeds certified {cert.modulus} for {spec.name}"
        )
    return float(c), cert


def _check_normalized(weights: np.ndarray) -> None:
    total = math.fsum(weights)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise WeightsNotNormalized(f"weights sum to {total}, expected 1 within {WEIGHT_SUM_TOL}")


def _evaluate(spec: FunctionSpec, points: np.ndarray) -> np.ndarray:
    return np.array([spec.evaluator(float(t)) for t in points], dtype=float)


def _endpoint_width(spec: FunctionSpec) -> float:
    width = spec.beta - spec.alpha
    if width < MIN_INTERVAL_WIDTH:
        raise DegenerateInterval(
            f"interval width {width} too small for endpoint bounds"
        )
    return width


def jensen_strong(
    x: WeightedVector,
    spec: FunctionSpec,
    c: Optional[float] = None,
    *,
    certificate: Optional[ModulusCertificate] = None,
    unchecked: bool = False,
) -> JensenBound:
    """Mean-value lower bound with quadratic strengthening.

    For normalized weights ``a`` and points in the interval,
    ``f(S_a x) <= S_a f(x) - c * S_a (x - S_a x)^2``.

    Raises:
        WeightsNotNormalized: if the weights do not sum to one.
        PointOutOfInterval: if a point leaves the interval.
        ModulusNotCertified: per :func:`resolve_modulus`.
    """
    _check_normalized(x.weights)
    spec.require_inside(x.points)
    modulus, _ = resolve_modulus(spec, c, certificate, unchecked=unchecked)
    pts = x.points
    wts = x.weights
    xbar = float(wts @ pts)
    fx = _evaluate(spec, pts)
    variance = float(wts @ ((pts - xbar) ** 2))
    return JensenBound(
        lhs=spec.evaluator(xbar),
        rhs=float(wts @ fx) - modulus * variance,
        variance_term=variance,
    )


def lah_ribaric_strong(
    x: WeightedVector,
    spec: FunctionSpec,
    c: Optional[float] = None,
    *,
    certificate: Optional[ModulusCertificate] = None,
    unchecked: bool = False,
) -> LahRibaricBound:
    """Endpoint chord upper bound with quadratic strengthening.

    For normalized weights, ``S_a f(x)`` is at most the chord of ``f``
    over ``[alpha, beta]`` evaluated at the weighted mean, minus
    ``c * S_a (beta - x)(x - alpha)``.

    Raises:
        WeightsNotNormalized: if the weights do not sum to one.
        DegenerateInterval: if the interval is numerically a point.
        ModulusNotCertified: per :func:`resolve_modulus`.
    """
    _check_normalized(x.weights)
    spec.require_inside(x.points)
    modulus, _ = resolve_modulus(spec, c, certificate, unchecked=unchecked)
    width = _endpoint_width(spec)
    al, be = spec.interval
    pts = x.points
    wts = x.weights
    xbar = float(wts @ pts)
    fx = _evaluate(spec, pts)
    chord = ((be - xbar) * spec.evaluator(al) + (xbar - al) * spec.evaluator(be)) / width
    correction = modulus * float(wts @ ((be - pts) * (pts - al)))
    return LahRibaricBound(lhs=float(wts @ fx), rhs=chord - correction)


def converse_sherman_strong(
    x: WeightedVector,
    total_weight: float,
    spec: FunctionSpec,
    c: Optional[float] = None,
    *,
    certificate: Optional[ModulusCertificate] = None,
    unchecked: bool = False,
) -> float:
    """Endpoint upper bound on ``S_a f(x)`` for arbitrary total weight.

    ``total_weight`` is the common total ``B = sum_i b_i = sum_j a_j`` of
    the weighted-majorized pair (for normalized weights this reduces to
    the chord bound of :func:`lah_ribaric_strong`).

    Raises:
        DegenerateInterval: if the interval is numerically a point.
        ModulusNotCertified: per :func:`resolve_modulus`.
    """
    spec.require_inside(x.points)
    modulus, _ = resolve_modulus(spec, c, certificate, unchecked=unchecked)
    width = _endpoint_width(spec)
    al, be = spec.interval
    pts = x.points
    wts = x.weights
    sax = float(wts @ pts)
    chord = (
        (total_weight * be - sax) * spec.evaluator(al)
        + (sax - total_weight * al) * spec.evaluator(be)
    ) / width
    correction = modulus * float(wts @ ((be - pts) * (pts - al)))
    return chord - correction


class ShermanBound(NamedTuple):
    """Lower link of the chain: ``lhs <= strong_bound <= plain_bound``."""

    lhs: float
    strong_bound: float
    plain_bound: float
    correction_quadratic: float
    modulus: float


def sherman_strong(
    x: WeightedVector,
    y: WeightedVector,
    spec: FunctionSpec,
    c: Optional[float] = None,
    *,
    matrix: Optional[StochasticMatrix] = None,
    certificate: Optional[ModulusCertificate] = None,
    unchecked_modulus: bool = False,
    assume_majorized: bool = False,
    tol: float = 1e-9,
) -> ShermanBound:
    """Strongly convex majorization bound ``S_b f(y) <= S_a f(x) - c*(S_a x^2 - S_b y^2)``.

    The weighted majorization of ``(y, b)`` by ``(x, a)`` must either be
    verified here (pass the row-stochastic witness ``matrix``) or be
    vouched for by the caller with ``assume_majorized=True``.

    Raises:
        MajorizationNotVerified: if no witness is given and the caller
            did not assume majorization, or the witness fails to verify.
        ModulusNotCertified: per :func:`resolve_modulus`.
    """
    spec.require_inside(x.points)
    spec.require_inside(y.points)
    if matrix is not None:
        result = verify_weighted_majorization(x, y, matrix, tol)
        if not result.passed:
            raise MajorizationNotVerified(
                f"witness residuals (weights {result.weight_residual}, "
                f"points {result.point_residual}) exceed {tol}"
            )
    elif not assume_majorized:
        raise MajorizationNotVerified(
            "pass a stochastic witness matrix or set assume_majorized=True"
        )
    modulus, _ = resolve_modulus(spec, c, certificate, unchecked=unchecked_modulus)
    lhs = float(y.weights @ _evaluate(spec, y.points))
    plain = float(x.weights @ _evaluate(spec, x.points))
    delta = float(x.weights @ (x.points * x.points)) - float(y.weights @ (y.points * y.points))
    correction = modulus * delta
    return ShermanBound(
        lhs=lhs,
        strong_bound=plain - correction,
        plain_bound=plain,
        correction_quadratic=correction,
        modulus=modulus,
    )


def full_chain(
    x: WeightedVector,
    y: WeightedVector,
    matrix: StochasticMatrix,
    spec: FunctionSpec,
    c: Optional[float] = None,
    *,
    certificate: Optional[ModulusCertificate] = None,
    unchecked_modulus: bool = False,
    tol: float = 1e-9,
) -> BoundChain:
    """Verify the witness and evaluate every link of the two-sided chain.

    Args:
        x: Majorant side ``(x, a)``.
        y: Majorized side ``(y, b)``.
        matrix: Row-stochastic witness with ``a = b A`` and ``y = A x``.
        spec: Function, strongly convex on its interval.
        c: Optional explicit modulus; None auto-certifies at order 2.
        certificate: Optional precomputed modulus certificate to reuse.
        unchecked_modulus: Accept ``c`` without certification.
        tol: Witness verification tolerance.

    Returns:
        A :class:`BoundChain`; ``chain_holds`` reports whether each of
        the three inequalities holds within :data:`CHAIN_SLACK`.

    Raises:
        MajorizationNotVerified: if the witness fails verification.
        ModulusNotCertified: per :func:`resolve_modulus`.
        DegenerateInterval: if the interval is numerically a point.
    """
    spec.require_inside(x.points)
    spec.require_inside(y.points)
    result = verify_weighted_majorization(x, y, matrix, tol)
    if not result.passed:
        raise MajorizationNotVerified(
            f"witness residuals (weights {result.weight_residual}, "
            f"points {result.point_residual}) exceed {tol}"
        )
    modulus, _ = resolve_modulus(spec, c, certificate, unchecked=unchecked_modulus)
    width = _endpoint_width(spec)
    al, be = spec.interval

    warnings: list[str] = []
    total = y.weight_sum
    if total <= 0.0:
        warnings.append("all weights are zero; every sum in the chain is vacuous")

    fx = _evaluate(spec, x.points)
    fy = _evaluate(spec, y.points)
    lhs = float(y.weights @ fy)
    plain = float(x.weights @ fx)
    delta = float(x.weights @ (x.points * x.points)) - float(y.weights @ (y.points * y.points))
    correction_quadratic = modulus * delta
    strong = plain - correction_quadratic

    sax = float(x.weights @ x.points)
    correction_converse = modulus * float(x.weights @ ((be - x.points) * (x.points - al)))
    converse = (
        (total * be - sax) * spec.evaluator(al) + (sax - total * al) * spec.evaluator(be)
    ) / width - correction_converse

    chain_holds = (
        lhs <= strong + CHAIN_SLACK
        and strong <= plain + CHAIN_SLACK
        and plain <= converse + CHAIN_SLACK
    )
    weights = np.concatenate([x.weights, y.weights])
    fuchs = x.size == y.size and float(np.ptp(weights)) <= 1e-12 * max(1.0, float(weights.max()))
    return BoundChain(
        lhs=lhs,
        strong_bound=strong,
        plain_bound=plain,
        converse_bound=converse,
        correction_quadratic=correction_quadratic,
        correction_converse=correction_converse,
        modulus=modulus,
        chain_holds=chain_holds,
        fuchs_case=fuchs,
        warnings=tuple(warnings),
    )
