"""Named self-checks run by ``vdwtails validate``.

Each check returns a ``CheckResult``; the suite never raises for a failed
check, only records it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import engine, fixtures, oracle, quadrature
from .geometry import (
    longitudinal_dyadic,
    photon_propagator,
    propagator_double_contraction,
    transverse_dyadic,
)
from .model import PairSystem
from .polarizability import Prescription, mixed_polarizability, polarizability_tensor, static_polarizability


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: object
    expected: object
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = bool(self.passed)
        return out


def _rel(a, b) -> float:
    scale = abs(b)
    return abs(a - b) / scale if scale else abs(a - b)


def check_two_denominators():
    closed = quadrature.identity_two_denominators(1.0, 1.0)
    numeric, _ = quadrature.identity_two_denominators_numeric(1.0, 1.0)
    err = max(_rel(closed, 2j * math.pi), _rel(numeric, 2j * math.pi))
    return CheckResult("identity_two_denominators(1,1) = 2*pi*i", err <= 1e-10, numeric, 2j * math.pi, 1e-10)


def check_wick_denominators():
    worst = 0.0
    for ea, eb in ((1.0, 1.0), (-0.1, 0.4), (0.3, -2.0), (-1.5, -0.5)):
        numeric, _ = quadrature.identity_wick_denominators_numeric(ea, eb)
        worst = max(worst, _rel(numeric, quadrature.identity_wick_denominators(ea, eb)))
    return CheckResult(
        "identity_wick_denominators signed = 4*pi*sgn*sgn/(|E_A|+|E_B|)", worst <= 1e-10, worst, 0.0, 1e-10
    )


def check_contraction_identities():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(10):
        v = rng.normal(size=3)
        a, b = transverse_dyadic(v), longitudinal_dyadic(v)
        got = (np.sum(a * a), np.sum(a * b), np.sum(b * b), np.trace(a), np.trace(b))
        worst = max(worst, max(abs(g - e) for g, e in zip(got, (2.0, 2.0, 6.0, 2.0, 0.0))))
    return CheckResult("dyadic contractions aa=2, ab=2, bb=6, tr a=2, tr b=0", worst <= 1e-13, worst, 0.0, 1e-13)


def check_propagator_contraction():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        omega = 10 ** rng.uniform(-3, 0)
        R = 10 ** rng.uniform(0, 4)
        D = photon_propagator(omega, (0.0, 0.0, R)).entries
        worst = max(worst, _rel(propagator_double_contraction(omega, R), complex(np.sum(D * D))))
    return CheckResult("closed sum D_ij D_ij equals entrywise contraction", worst <= 1e-12, worst, 0.0, 1e-12)


def check_feynman_evenness():
    atom = fixtures.three_level_atom()
    worst = 0.0
    for omega in (0.05, 0.13 + 0.02j, 0.7, 0.3j):
        plus = polarizability_tensor(atom, "n", omega).entries
        minus = polarizability_tensor(atom, "n", -omega).entries
        worst = max(worst, float(np.max(np.abs(plus - minus))))
    retarded = polarizability_tensor(atom, "n", 0.2, Prescription.RETARDED, epsilon=1e-3).entries
    retarded_m = polarizability_tensor(atom, "n", -0.2, Prescription.RETARDED, epsilon=1e-3).entries
    odd = float(np.max(np.abs(retarded - retarded_m)))
    ok = worst <= 1e-14 and odd > 1e-6
    return CheckResult(
        "feynman polarizability is even, retarded is not", ok, worst, 0.0, 1e-14, f"retarded asymmetry {odd:.3e}"
    )


def check_static_polarizability():
    value = static_polarizability(fixtures.two_level_atom(), "g")
    return CheckResult("two-level static polarizability = 4", abs(value - 4.0) <= 1e-14, value, 4.0, 1e-14)


def check_vdw_brute_force():
    worst = 0.0
    for pair in (fixtures.ground_pair(), fixtures.excited_pair()):
        worst = max(worst, _rel(engine.vdw_limit(pair), oracle.brute_force_vdw(pair)))
    ground = engine.vdw_limit(fixtures.ground_pair())
    ok = worst <= 1e-12 and abs(ground + 6.0) <= 1e-12
    return CheckResult("vdW coefficient equals product-basis perturbation theory", ok, worst, 0.0, 1e-12)


def short_range_deviation(pair: PairSystem, x_values):
    """|total * R^6 / C - 1| at x = |E_min| R / c, with C the vdW coefficient."""
    e_min = min(abs(p.E_m) for p in engine.direct_poles(pair, 1.0)) if engine.direct_poles(pair, 1.0) else 1.0
    target = oracle.brute_force_vdw(pair)
    out = []
    for x in x_values:
        R = x * pair.c / e_min
        out.append(abs(engine.total_direct(pair, R).total_plus * R**6 / target - 1.0))
    return np.array(out)


def check_short_range():
    pair = fixtures.excited_pair()
    xs = np.logspace(-4, -2, 5)
    dev = short_range_deviation(pair, xs)
    slope = float(np.polyfit(np.log(xs), np.log(dev), 1)[0])
    at = float(short_range_deviation(pair, [1e-3])[0])
    ok = at <= 1e-4 and abs(slope - 2.0) <= 0.2
    return CheckResult(
        "total ~ vdW at short range, slope 2", ok, slope, 2.0, 0.2, f"relative deviation {at:.3e} at x = 1e-3"
    )


def check_casimir_polder():
    pair = fixtures.ground_pair()
    R = 1e3 * pair.c / 0.5
    value = engine.wick_term_direct(pair, R) * R**7
    expected = -23.0 / (4 * math.pi) * pair.c * 4.0 * 4.0
    err = _rel(value, expected)
    return CheckResult("Wick term -> -(23/4pi) c alpha_A alpha_B / R^7", err <= 1e-3, value, expected, 1e-3)


def check_width_substitution():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(20):
        x = 10 ** rng.uniform(-3, 2)
        aa, ab, bb = rng.normal(size=3)
        A, B = engine.pole_cos_sin_coefficients(x, aa, ab, bb)
        gamma = engine.pole_width_part(x, aa, ab, bb)
        worst = max(worst, abs(gamma - engine.substitute_cos_sin(x, A, B)) / max(1.0, abs(gamma)))
    return CheckResult("width equals pole shift with cos->sin, sin->-cos, times two", worst <= 1e-14, worst, 0.0, 1e-14)


def check_oracle():
    pair = fixtures.excited_pair()
    R = 500.0
    b = engine.total_direct(pair, R)
    engine_value = complex(b.total_plus, -0.5 * b.width_total_plus)
    value = oracle.contour_shift_direct(pair, R)
    err = _rel(value, engine_value)
    return CheckResult("eps-extrapolated real-axis integral equals W + P - i Gamma/2", err <= 1e-4, value, engine_value, 1e-4)


def check_mixing_collapse():
    atom = fixtures.exchange_atom()
    pair = PairSystem(atom, atom, "g", "g", identical=True)
    R = 40.0
    diffs = [
        _rel(engine.mixing_wick(pair, R), engine.wick_term_direct(pair, R)),
        _rel(engine.mixing_vdw_limit(pair), engine.vdw_limit(pair)),
        _rel(engine.casimir_polder_coefficient(pair, "mix"), engine.casimir_polder_coefficient(pair)),
    ]
    for anchor in ("A", "B"):
        m = mixed_polarizability(atom, "g", "g", anchor, 0.11j).entries
        d = polarizability_tensor(atom, "g", 0.11j).entries
        diffs.append(float(np.max(np.abs(m - d)) / np.max(np.abs(d))))
    worst = max(diffs)
    return CheckResult("exchange terms equal direct terms for equal states", worst <= 1e-12, worst, 0.0, 1e-12)


CHECKS = (
    check_two_denominators,
    check_wick_denominators,
    check_contraction_identities,
    check_propagator_contraction,
    check_feynman_evenness,
    check_static_polarizability,
    check_vdw_brute_force,
    check_short_range,
    check_casimir_polder,
    check_width_substitution,
    check_oracle,
    check_mixing_collapse,
)


def run_suite() -> list:
    results = []
    for check in CHECKS:
        try:
            results.append(check())
        except Exception as exc:  # a crashing check is a failed check
            name = check.__name__.removeprefix("check_")
            results.append(CheckResult(name, False, None, None, 0.0, f"{type(exc).__name__}: {exc}"))
    return results

