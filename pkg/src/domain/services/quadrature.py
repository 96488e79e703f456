"""Adaptive Quadrature - Domain Services

Globally adaptive Gauss-Kronrod (7/15) integration on finite intervals and
on caller-truncated half-lines. Every expectation in the toolkit goes through
this module, so truncation and tolerance policy live here and nowhere else.

Integrands are called with a numpy array of nodes; scalar-only callables are
detected and evaluated point by point.
"""
import heapq
import math
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from src.domain.entities.numerics_settings import (
    DEFAULT_MAX_EVALUATIONS,
    DEFAULT_REL_TOL,
    DEFAULT_TAIL_CUTOFF,
)
from src.domain.entities.quadrature_result import QuadratureResult
from src.domain.exceptions import (
    DivergentExpectation,
    DomainError,
    NonConvergence,
    NonFiniteIntegrand,
)

Integrand = Callable[[np.ndarray], np.ndarray]

# Kronrod abscissae on [-1, 1]: odd entries are the 7-point Gauss nodes
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_EPS = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny
_NODES_PER_RULE = 15

MAX_TAIL_EXTENSIONS = 60


def _evaluate(fn: Integrand, nodes: np.ndarray) -> np.ndarray:
    """Evaluate the integrand on a node array and reject non-finite values"""
    try:
        values = np.asarray(fn(nodes), dtype=float)
    except (TypeError, ValueError):
        values = None

    if values is not None and values.ndim == 0:
        values = np.full(nodes.shape, float(values))
    elif values is None or values.shape != nodes.shape:
        values = np.array([float(fn(float(x))) for x in nodes])

    finite = np.isfinite(values)
    if not np.all(finite):
        bad = float(nodes[~finite][0])
        raise NonFiniteIntegrand(f"Integrand is not finite at t={bad!r}", point=bad)
    return values


def _gauss_kronrod(fn: Integrand, a: float, b: float) -> Tuple[float, float, float]:
    """Apply the 15-point Kronrod rule and its embedded 7-point Gauss rule.

    Returns (integral, error estimate, integral of |fn|) using the QUADPACK
    error scaling.
    """
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    nodes = np.concatenate([
        center - half * _XGK[:7],
        [center],
        center + half * _XGK[6::-1],
    ])
    values = _evaluate(fn, nodes)

    f_center = values[7]
    f_left = values[:7]
    f_right = values[8:][::-1]

    kronrod = _WGK[7] * f_center + float(np.dot(_WGK[:7], f_left + f_right))
    gauss = _WG[3] * f_center + float(np.dot(_WG[:3], f_left[1::2] + f_right[1::2]))
    resabs = _WGK[7] * abs(f_center) + float(np.dot(_WGK[:7], np.abs(f_left) + np.abs(f_right)))
    mean = 0.5 * kronrod
    resasc = _WGK[7] * abs(f_center - mean) + float(
        np.dot(_WGK[:7], np.abs(f_left - mean) + np.abs(f_right - mean))
    )

    result = kronrod * half
    resabs *= abs(half)
    resasc *= abs(half)
    error = abs((kronrod - gauss) * half)

    if resasc != 0.0 and error != 0.0:
        error = resasc * min(1.0, (200.0 * error / resasc) ** 1.5)
    if resabs > _UFLOW / (50.0 * _EPS):
        error = max(50.0 * _EPS * resabs, error)

    return result, error, resabs


def _check_bounds(a: float, b: float, rel_tol: float) -> None:
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"Integration limits must be finite, got [{a}, {b}]")
    if a > b:
        raise DomainError(f"Integration limits must satisfy a <= b, got [{a}, {b}]")
    if not 0.0 < rel_tol < 1.0:
        raise DomainError(f"rel_tol must lie in (0, 1), got {rel_tol}")


def _segments(a: float, b: float, breakpoints: Iterable[float]) -> List[float]:
    inner = sorted({float(p) for p in breakpoints if a < float(p) < b})
    return [a] + inner + [b]


def integrate(
    fn: Integrand,
    a: float,
    b: float,
    rel_tol: float = DEFAULT_REL_TOL,
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS,
    breakpoints: Iterable[float] = (),
) -> QuadratureResult:
    """Integrate fn over [a, b] by adaptive bisection.

    The interval with the largest error estimate is bisected until the summed
    estimate falls below max(rel_tol * |value|, round-off floor). Breakpoints
    inside (a, b) seed the initial partition, which keeps jumps of piecewise
    integrands on interval boundaries.
    """
    a = float(a)
    b = float(b)
    _check_bounds(a, b, rel_tol)

    if a == b:
        _evaluate(fn, np.array([a]))
        return QuadratureResult(value=0.0, abs_error_estimate=0.0, evaluations=1)

    heap: List[Tuple[float, int, float, float, float, float, float]] = []
    settled: List[Tuple[float, float]] = []
    sequence = 0
    evaluations = 0
    total = 0.0
    total_error = 0.0
    total_abs = 0.0

    edges = _segments(a, b, breakpoints)
    for left, right in zip(edges[:-1], edges[1:]):
        if evaluations + _NODES_PER_RULE > max_evaluations:
            raise NonConvergence(
                f"Evaluation budget {max_evaluations} too small for the initial partition",
                evaluations=evaluations,
            )
        value, error, resabs = _gauss_kronrod(fn, left, right)
        evaluations += _NODES_PER_RULE
        total += value
        total_error += error
        total_abs += resabs
        heapq.heappush(heap, (-error, sequence, left, right, value, error, resabs))
        sequence += 1

    while total_error > max(rel_tol * abs(total), 50.0 * _EPS * total_abs):
        if not heap:
            raise NonConvergence(
                f"Intervals on [{a}, {b}] cannot be refined further; "
                f"error estimate {total_error:.3e} exceeds tolerance",
                evaluations=evaluations,
                abs_error_estimate=total_error,
            )
        if evaluations + 2 * _NODES_PER_RULE > max_evaluations:
            raise NonConvergence(
                f"Evaluation budget {max_evaluations} exhausted on [{a}, {b}]; "
                f"error estimate {total_error:.3e}",
                evaluations=evaluations,
                abs_error_estimate=total_error,
            )

        _, _, left, right, value, error, resabs = heapq.heappop(heap)
        middle = 0.5 * (left + right)
        if not left < middle < right:
            settled.append((value, error))
            continue

        value_l, error_l, abs_l = _gauss_kronrod(fn, left, middle)
        value_r, error_r, abs_r = _gauss_kronrod(fn, middle, right)
        evaluations += 2 * _NODES_PER_RULE

        total += value_l + value_r - value
        total_error += error_l + error_r - error
        total_abs += abs_l + abs_r - resabs

        heapq.heappush(heap, (-error_l, sequence, left, middle, value_l, error_l, abs_l))
        heapq.heappush(heap, (-error_r, sequence + 1, middle, right, value_r, error_r, abs_r))
        sequence += 2

    pieces = [(item[4], item[5]) for item in heap] + settled
    return QuadratureResult(
        value=math.fsum(p[0] for p in pieces),
        abs_error_estimate=math.fsum(p[1] for p in pieces),
        evaluations=evaluations,
    )


def integrate_halfline(
    fn: Integrand,
    a: float,
    upper: float,
    rel_tol: float = DEFAULT_REL_TOL,
    tail_cutoff: float = DEFAULT_TAIL_CUTOFF,
    tail_bound: Optional[float] = None,
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS,
    breakpoints: Iterable[float] = (),
) -> QuadratureResult:
    """Integrate fn over [a, inf) truncated at the caller's T* = upper.

    The caller guarantees the mass of fn beyond upper is below tail_cutoff
    (or below tail_bound when given); that bound is added to the error.
    """
    if not 0.0 < tail_cutoff <= 1e-6:
        raise DomainError(f"tail_cutoff must lie in (0, 1e-6], got {tail_cutoff}")
    if not math.isfinite(upper):
        raise DomainError(f"Truncation point must be finite, got {upper}")

    body = integrate(fn, a, max(float(upper), float(a)), rel_tol, max_evaluations, breakpoints)
    truncation = tail_cutoff if tail_bound is None else abs(float(tail_bound))
    return QuadratureResult(
        value=body.value,
        abs_error_estimate=body.abs_error_estimate + truncation,
        evaluations=body.evaluations,
    )


def integrate_to_tail(
    fn: Integrand,
    a: float,
    upper: float,
    rel_tol: float = DEFAULT_REL_TOL,
    tail_cutoff: float = DEFAULT_TAIL_CUTOFF,
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS,
    breakpoints: Iterable[float] = (),
    max_extensions: int = MAX_TAIL_EXTENSIONS,
) -> QuadratureResult:
    """Integrate fn over [a, inf) when only a first guess of T* is known.

    After [a, upper] the integration continues over segments of doubling
    width until a segment contributes at most tail_cutoff relative to the
    running total; the last segment is charged to the error estimate. An
    integrand that keeps contributing (or overflows) is reported as a
    DivergentExpectation.
    """
    a = float(a)
    left = max(float(upper), a)
    total = integrate(fn, a, left, rel_tol, max_evaluations, breakpoints)
    width = max(left - a, 1.0)

    for _ in range(max_extensions):
        right = left + width
        remaining = max_evaluations - total.evaluations
        try:
            piece = integrate(fn, left, right, rel_tol, remaining)
        except NonFiniteIntegrand as exc:
            raise DivergentExpectation(
                f"Integrand overflows beyond t={left:.6g}; the expectation diverges"
            ) from exc
        total = total + piece

        if abs(piece.value) <= tail_cutoff * abs(total.value):
            return QuadratureResult(
                value=total.value,
                abs_error_estimate=total.abs_error_estimate + abs(piece.value),
                evaluations=total.evaluations,
            )
        left = right
        width *= 2.0

    raise DivergentExpectation(
        f"Integrand tail still contributes {abs(piece.value):.3e} beyond t={left:.6g} "
        f"after {max_extensions} extensions; the expectation diverges"
    )
