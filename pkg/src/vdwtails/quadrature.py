"""Adaptive Gauss-Kronrod integration of complex, vectorised integrands.

The integrator works on a list of panels, each tied to one integrand. The
panels carrying the largest error estimates are bisected in batches until the
summed estimate meets the tolerance. Results are accumulated with math.fsum
in a fixed panel order, so the output does not depend on the order in which
panels were refined.

Two closed-form frequency integrals of products of energy denominators, plus
their numerical counterparts, are provided for cross-checking the shift engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, InputError

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
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

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod abscissae.
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[13, 11, 9]] = _WG[:3]

TAIL_FACTOR = 40.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and initial layout for ``integrate_halfline``.

    Attributes:
        rel_tol: relative tolerance on the value.
        abs_tol: absolute tolerance on the value.
        max_subdivisions: maximum number of panel bisections.
        decay_scale: frequency scale beyond which the integrand decays.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 200
    decay_scale: float = 1.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InputError("quadrature tolerances must be positive")
        if int(self.max_subdivisions) < 1:
            raise InputError("max_subdivisions must be at least 1")
        if not self.decay_scale > 0:
            raise InputError("decay_scale must be positive")


def _gk15(func, a: np.ndarray, b: np.ndarray):
    """Kronrod and Gauss estimates on many panels [a, b] of one integrand."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(func(x.ravel()), dtype=complex).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise DomainError("integrand returned a non-finite value")
    kron = half * (fx @ KRONROD_WEIGHTS)
    gauss = half * (fx @ GAUSS_WEIGHTS)
    return kron, np.abs(kron - gauss)


def integrate_panels(
    integrands: Sequence[Callable],
    panels: Iterable[tuple],
    rel_tol: float,
    abs_tol: float,
    max_subdivisions: int,
):
    """Adaptive integration over a set of (integrand index, a, b) panels.

    Returns:
        (value, error_estimate) with the value summed over all panels.

    Raises:
        ConvergenceError: when ``max_subdivisions`` bisections do not suffice.
    """
    by_func: dict = {}
    for idx, a, b in panels:
        if b > a:
            by_func.setdefault(idx, []).append((float(a), float(b)))
    state = []  # rows of (idx, a, b, value, err)
    for idx in sorted(by_func):
        arr = np.array(by_func[idx])
        vals, errs = _gk15(integrands[idx], arr[:, 0], arr[:, 1])
        state.extend(zip([idx] * len(arr), arr[:, 0], arr[:, 1], vals, errs))

    def total():
        vals = [row[3] for row in sorted(state, key=lambda r: (r[0], r[1]))]
        re = math.fsum(v.real for v in vals)
        im = math.fsum(v.imag for v in vals)
        return complex(re, im), math.fsum(row[4] for row in state)

    value, err = total()
    used = 0
    while err > max(rel_tol * abs(value), abs_tol):
        budget = max_subdivisions - used
        if budget <= 0:
            raise ConvergenceError(
                f"quadrature did not converge after {max_subdivisions} subdivisions "
                f"(value {value!r}, error estimate {err:.3e})",
                value,
                err,
            )
        state.sort(key=lambda r: (-r[4], r[0], r[1]))
        target = max(rel_tol * abs(value), abs_tol)
        share = target / max(len(state), 1)
        n_split = sum(1 for row in state if row[4] > share)
        n_split = max(1, min(n_split, budget, max(1, len(state) // 2 + 1)))
        split, state = state[:n_split], state[n_split:]
        used += n_split
        new_rows = []
        for idx in sorted({row[0] for row in split}):
            rows = [row for row in split if row[0] == idx]
            a = np.array([r[1] for r in rows])
            b = np.array([r[2] for r in rows])
            m = 0.5 * (a + b)
            lo = np.concatenate([a, m])
            hi = np.concatenate([m, b])
            vals, errs = _gk15(integrands[idx], lo, hi)
            new_rows.extend(zip([idx] * len(lo), lo, hi, vals, errs))
        state.extend(new_rows)
        value, err = total()
    return value, err


def halfline_layout(spec: QuadratureSpec, breakpoints: Iterable[float] = ()) -> np.ndarray:
    """Initial panel edges on [0, 40 * decay_scale]."""
    scale = spec.decay_scale
    cutoff = TAIL_FACTOR * scale
    edges = {0.0, cutoff}
    edges.update(scale * 2.0 ** np.arange(-6, 6))
    for bp in breakpoints:
        if 0.0 < bp < cutoff:
            edges.add(float(bp))
    return np.array(sorted(edges))


def integrate_halfline(f: Callable, spec: QuadratureSpec = QuadratureSpec(), breakpoints: Iterable[float] = ()):
    """Integrate a vectorised complex integrand over (0, infinity).

    Panels cover (0, 40 * decay_scale]; the remainder is mapped onto [0, 1)
    with omega = cutoff + decay_scale * t / (1 - t).

    Args:
        f: callable taking a float array and returning values of the same shape.
        spec: tolerances and decay scale.
        breakpoints: optional extra panel edges where f has structure.

    Returns:
        (value, error_estimate).
    """
    edges = halfline_layout(spec, breakpoints)
    cutoff = edges[-1]
    scale = spec.decay_scale

    def tail(t):
        one_minus = 1.0 - t
        return f(cutoff + scale * t / one_minus) * (scale / (one_minus * one_minus))

    panels = [(0, a, b) for a, b in zip(edges[:-1], edges[1:])]
    panels += [(1, 0.0, 0.5), (1, 0.5, 1.0)]
    return integrate_panels([f, tail], panels, spec.rel_tol, spec.abs_tol, spec.max_subdivisions)


def integrate_interval(f: Callable, a: float, b: float, spec: QuadratureSpec = QuadratureSpec(), pieces: int = 4):
    """Adaptive integral of a vectorised integrand over a finite interval."""
    edges = np.linspace(a, b, pieces + 1)
    panels = [(0, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
    return integrate_panels([f], panels, spec.rel_tol, spec.abs_tol, spec.max_subdivisions)


def identity_two_denominators(EvA: float, EvB: float) -> complex:
    """Closed form 4 pi i / (EvA + EvB) of the time-ordered denominator integral."""
    total = EvA + EvB
    if total == 0:
        raise DomainError("EvA + EvB = 0: the two pole pairs pinch the contour")
    return 4j * math.pi / total


def identity_wick_denominators(EmA: float, EqB: float) -> float:
    """Closed form 4 pi sgn(EmA) sgn(EqB) / (|EmA| + |EqB|) of the imaginary-axis integral."""
    if EmA == 0 or EqB == 0:
        raise DomainError("energies must be non-zero")
    return 4.0 * math.pi * math.copysign(1.0, EmA) * math.copysign(1.0, EqB) / (abs(EmA) + abs(EqB))


def _pair_sum(E, w):
    return 1.0 / (E - w) + 1.0 / (E + w)


def identity_two_denominators_numeric(EvA: float, EvB: float, spec: QuadratureSpec = None):
    """Integrate the time-ordered denominator product along the displaced contour.

    With -i0 in every denominator the poles at +E sit below the real axis and
    those at -E above it. The contour follows the real axis outside [-P, P],
    dips below the negative poles on a half circle over [-P, 0] and rises
    above the positive ones on a half circle over [0, P].

    Returns:
        (value, error_estimate).
    """
    if not (EvA > 0 and EvB > 0):
        raise DomainError("the displaced-contour check needs positive energies")
    if spec is None:
        spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-300, max_subdivisions=2000)
    P = 2.0 * max(EvA, EvB)
    r = 0.5 * P

    def g(w):
        return _pair_sum(EvA, w) * _pair_sum(EvB, w)

    def lower_arc(theta):
        # from -P through the lower half plane to 0
        z = -r + r * np.exp(1j * theta)
        return g(z) * 1j * r * np.exp(1j * theta)

    def upper_arc(theta):
        # from 0 through the upper half plane to P, traversed with decreasing theta
        z = r + r * np.exp(1j * theta)
        return -g(z) * 1j * r * np.exp(1j * theta)

    def outer(t):
        # both real half lines |w| > P, folded using evenness of g
        one_minus = 1.0 - t
        w = P + P * t / one_minus
        return 2.0 * g(w) * P / (one_minus * one_minus)

    panels = [(0, math.pi, 1.5 * math.pi), (0, 1.5 * math.pi, 2 * math.pi)]
    panels += [(1, 0.0, 0.5 * math.pi), (1, 0.5 * math.pi, math.pi)]
    panels += [(2, 0.0, 0.5), (2, 0.5, 1.0)]
    return integrate_panels([lower_arc, upper_arc, outer], panels, spec.rel_tol, spec.abs_tol, spec.max_subdivisions)


def identity_wick_denominators_numeric(EmA: float, EqB: float, spec: QuadratureSpec = None):
    """Integrate sum_pm 1/(EmA +- i w) * sum_pm 1/(EqB +- i w) over the real line.

    The summed denominators are real, 2E/(E^2 + w^2), and the integrand is even.

    Returns:
        (value, error_estimate).
    """
    if EmA == 0 or EqB == 0:
        raise DomainError("energies must be non-zero")
    scale = max(abs(EmA), abs(EqB))
    if spec is None:
        spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-300, max_subdivisions=2000, decay_scale=scale)

    def f(w):
        return 2.0 * (2 * EmA / (EmA * EmA + w * w)) * (2 * EqB / (EqB * EqB + w * w))

    value, err = integrate_halfline(f, spec, breakpoints=(abs(EmA), abs(EqB)))
    return value.real, err


def laplace_check_values() -> dict:
    """Reference integrals with known closed forms (used by the self-check suite)."""
    return {
        "exp": (lambda w: np.exp(-w), 1.0),
        "quartic": (lambda w: w**4 * np.exp(-2 * w), 0.75),
        "cosine": (lambda w: np.exp(-w) * np.cos(10 * w), 1.0 / 101.0),
    }

