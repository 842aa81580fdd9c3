"""Interaction energy of two atoms split into Wick-rotated, pole and width terms.

Conventions (atomic units): the direct energy shift of a pair is

    Delta E = W + sum_m Q_m,   Q_m = P_m - (i/2) Gamma_m,

where W is the integral along the imaginary frequency axis and each Q_m is
the residue of a first-quadrant pole coming from a dipole-connected level
below the reference state. For identical atoms the exchange analogue uses
the mixed polarizabilities; the eigen-energies are direct +- exchange.

Wick integrals are done in the dimensionless variable u = omega R / c, in
which the propagator product becomes (c^4/R^6) N(u) N(u) with
N(u) = u^2 alpha + (u + 1) beta and no inverse powers of u survive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceError, InputError, PreconditionError, ResonanceError
from .geometry import contract, longitudinal_dyadic, transverse_dyadic
from .model import DEFAULT_DEGENERACY_TOL, PairSystem, virtual_states
from .polarizability import SpectralSide, direct_side, isotropic_part, mixed_side
from .quadrature import QuadratureSpec, identity_wick_denominators, integrate_halfline

WICK_REL_TOL = 1e-12
WICK_MAX_SUBDIVISIONS = 2000


@dataclass(frozen=True)
class PoleContribution:
    """Residue of one lower-lying virtual level (or degenerate group).

    Attributes:
        state_label: member labels joined with "+".
        E_m: level energy minus reference energy (negative).
        Q: complex residue contribution.
        P: energy shift part.
        Gamma: induced width.
        atom: which atom ("A" or "B") carries the lower level.
        argument_asymmetry: exchange terms only; relative change of Q when the
            partner polarizability is evaluated at +E_m instead of -E_m.
    """

    state_label: str
    E_m: float
    Q: complex
    P: float
    Gamma: float
    atom: str = "A"
    argument_asymmetry: float = 0.0


@dataclass(frozen=True)
class ShiftBreakdown:
    R: float
    wick_dir: float
    poles_dir: tuple
    wick_mix: Optional[float]
    poles_mix: Optional[tuple]
    total_plus: float
    total_minus: float
    width_total_plus: float
    width_total_minus: float

    @property
    def pole_real_dir(self) -> float:
        return math.fsum(p.P for p in self.poles_dir)

    @property
    def width_dir(self) -> float:
        return math.fsum(p.Gamma for p in self.poles_dir)

    @property
    def pole_real_mix(self) -> Optional[float]:
        if self.poles_mix is None:
            return None
        return math.fsum(p.P for p in self.poles_mix)

    @property
    def width_mix(self) -> Optional[float]:
        if self.poles_mix is None:
            return None
        return math.fsum(p.Gamma for p in self.poles_mix)

    @property
    def direct_total(self) -> float:
        return self.wick_dir + self.pole_real_dir

    @property
    def mixing_total(self) -> Optional[float]:
        if self.wick_mix is None:
            return None
        return self.wick_mix + self.pole_real_mix


# --- closed pole forms --------------------------------------------------------


def symmetric_table(X, Y, R_vec) -> tuple:
    """(aa, ab, bb) contractions of the atom tensors X (slots ik) and Y (slots jl).

    ``ab`` is the average of the two mixed contractions; the pole and Wick
    formulas only ever contain their sum.
    """
    a = transverse_dyadic(R_vec)
    b = longitudinal_dyadic(R_vec)
    aa = contract(a, a, X, Y)
    ab = 0.5 * (contract(a, b, X, Y) + contract(b, a, X, Y))
    bb = contract(b, b, X, Y)
    return aa, ab, bb


def pole_bracket(x: float, aa, ab, bb) -> complex:
    """exp(-2ix) [bb (1 + 2ix) - (2ab + bb) x^2 - 2i ab x^3 + aa x^4]."""
    poly = bb * (1 + 2j * x) - (2 * ab + bb) * x**2 - 2j * ab * x**3 + aa * x**4
    return complex(np.exp(-2j * x) * poly)


def pole_cos_sin_coefficients(x: float, aa, ab, bb) -> tuple:
    """Coefficients (A, B) of the shift written as A cos(2x) + B sin(2x)."""
    A = bb - (2 * ab + bb) * x**2 + aa * x**4
    B = 2 * x * (bb - ab * x**2)
    return A, B


def pole_real_part(x: float, aa, ab, bb) -> float:
    """cos(2x)[bb - (2ab + bb)x^2 + aa x^4] + 2x sin(2x)[bb - ab x^2]."""
    A, B = pole_cos_sin_coefficients(x, aa, ab, bb)
    return float(math.cos(2 * x) * A + math.sin(2 * x) * B)


def pole_width_part(x: float, aa, ab, bb) -> float:
    """2 {sin(2x)[bb - (2ab + bb)x^2 + aa x^4] - 2x cos(2x)[bb - ab x^2]}.

    Written out independently of ``pole_real_part`` so that the two can be
    compared through ``substitute_cos_sin``.
    """
    s, c = math.sin(2 * x), math.cos(2 * x)
    return float(2.0 * (s * (bb - (2 * ab + bb) * x * x + aa * x**4) - 2 * x * c * (bb - ab * x * x)))


def substitute_cos_sin(x: float, A: float, B: float) -> float:
    """Apply cos -> sin, sin -> -cos and a factor two to A cos(2x) + B sin(2x)."""
    return 2.0 * (A * math.sin(2 * x) - B * math.cos(2 * x))


def _make_pole(label, E_m, R, c, table, atom, asym=0.0) -> PoleContribution:
    aa, ab, bb = (float(np.real(t)) for t in table)
    x = E_m * R / c
    scale = -1.0 / R**6
    return PoleContribution(
        state_label=label,
        E_m=float(E_m),
        Q=scale * pole_bracket(x, aa, ab, bb),
        P=scale * pole_real_part(x, aa, ab, bb),
        Gamma=scale * pole_width_part(x, aa, ab, bb),
        atom=atom,
        argument_asymmetry=asym,
    )


# --- spectral sides -----------------------------------------------------------


def _direct_sides(pair: PairSystem):
    return direct_side(pair.atom_a, pair.ref_a), direct_side(pair.atom_b, pair.ref_b)


def _require_identical(pair: PairSystem):
    if not pair.identical:
        raise PreconditionError("exchange terms are only defined for a pair of identical atoms")


def _mixed_sides(pair: PairSystem):
    _require_identical(pair)
    atom = pair.atom_a
    return (
        mixed_side(atom, pair.ref_a, pair.ref_b, "A"),
        mixed_side(atom, pair.ref_a, pair.ref_b, "B"),
    )


def _partner_at(partner: SpectralSide, omega: float, pole_labels, tol=DEFAULT_DEGENERACY_TOL):
    """Partner polarizability at a pole frequency, refusing exact resonances."""
    for lab, b in zip(partner.labels, partner.energies):
        if abs(b - omega) <= tol or abs(b + omega) <= tol:
            raise ResonanceError(
                f"resonance between level(s) {'+'.join(pole_labels)} and {'+'.join(lab)}: "
                f"partner energy {b:.16g} vs pole frequency {omega:.16g}",
                labels=tuple(pole_labels) + tuple(lab),
            )
    return partner.evaluate(omega).real


def _poles_of(side: SpectralSide, partner: SpectralSide, pair: PairSystem, R: float, atom: str, only=None):
    out = []
    R_vec = pair.separation(R)
    for g, (lab, a) in enumerate(zip(side.labels, side.energies)):
        if a >= 0 or (only is not None and only not in lab):
            continue
        omega0 = -a
        numerator = side.second[g]
        partner_value = _partner_at(partner, omega0, lab)
        table = symmetric_table(numerator, partner_value, R_vec)
        asym = 0.0
        if not partner.is_symmetric:
            alt = _make_pole("", a, R, pair.c, symmetric_table(numerator, partner.evaluate(-omega0).real, R_vec), atom)
            ref = _make_pole("", a, R, pair.c, table, atom)
            asym = abs(alt.Q - ref.Q) / abs(ref.Q) if ref.Q != 0 else 0.0
        out.append(_make_pole("+".join(lab), a, R, pair.c, table, atom, asym))
    return out


def _single_pole(side, partner, pair, m_label, R):
    poles = _poles_of(side, partner, pair, R, "A", only=m_label)
    if not poles:
        for lab, a in zip(side.labels, side.energies):
            if m_label in lab:
                raise PreconditionError(f"level {m_label!r} lies above the reference (E = {a:.6g})")
        raise PreconditionError(f"level {m_label!r} is not dipole-connected to the reference")
    return poles[0]


# --- Wick integral ------------------------------------------------------------


def _wick_tables(side_a: SpectralSide, side_b: SpectralSide, R_vec):
    """Contraction tables for the even (S) and odd (D) numerator combinations."""
    na, nb = len(side_a), len(side_b)
    even = np.zeros((3, na, nb))
    odd = np.zeros((3, na, nb))
    for g in range(na):
        Sa = side_a.first[g] + side_a.second[g]
        Da = side_a.first[g] - side_a.second[g]
        for h in range(nb):
            Sb = side_b.first[h] + side_b.second[h]
            Db = side_b.first[h] - side_b.second[h]
            even[:, g, h] = symmetric_table(Sa, Sb, R_vec)
            if np.any(Da) and np.any(Db):
                odd[:, g, h] = symmetric_table(Da, Db, R_vec)
    return even, odd


def _wick_integrand(side_a: SpectralSide, side_b: SpectralSide, R: float, c: float, R_vec):
    even, odd = _wick_tables(side_a, side_b, R_vec)
    ea = np.asarray(side_a.energies, dtype=float)
    eb = np.asarray(side_b.energies, dtype=float)
    has_odd = bool(np.any(odd))

    def f(u):
        u = np.asarray(u, dtype=float)
        xi = u * (c / R)
        xi2 = (xi * xi)[:, None]
        da = ea[None, :] ** 2 + xi2
        db = eb[None, :] ** 2 + xi2
        ca, cb = ea[None, :] / da, eb[None, :] / db
        terms = np.einsum("ng,kgh,nh->kn", ca, even, cb)
        if has_odd:
            sa, sb = xi[:, None] / da, xi[:, None] / db
            terms = terms - np.einsum("ng,kgh,nh->kn", sa, odd, sb)
        aa, ab, bb = terms
        up1 = u + 1.0
        poly = u**4 * aa + 2.0 * u * u * up1 * ab + up1 * up1 * bb
        return np.exp(-2.0 * u) * poly

    scales = [abs(e) * R / c for e in np.concatenate([ea, eb])]
    return f, scales


def _integrate_scaled(f, scales, spec: Optional[QuadratureSpec] = None) -> float:
    """Integrate f over u in (0, inf) with breakpoints near every pole scale.

    ``spec.abs_tol`` is taken relative to the integral of |f|, so that values
    crossing zero still converge; the decay scale is fixed by exp(-2u).
    """
    breakpoints = sorted({s * k for s in scales for k in (0.25, 1.0, 4.0) if s > 0})
    if spec is None:
        spec = QuadratureSpec(rel_tol=WICK_REL_TOL, abs_tol=1e-14, max_subdivisions=WICK_MAX_SUBDIVISIONS)
    coarse = QuadratureSpec(rel_tol=1.0, abs_tol=1.0, max_subdivisions=1, decay_scale=0.5)
    magnitude, _ = integrate_halfline(lambda u: np.abs(f(u)), coarse, breakpoints)
    spec = replace(spec, abs_tol=max(spec.abs_tol * abs(magnitude), 1e-300), decay_scale=0.5)
    value, _ = integrate_halfline(f, spec, breakpoints)
    return value.real


def _wick(side_a: SpectralSide, side_b: SpectralSide, pair: PairSystem, R: float, spec=None) -> float:
    _check_R(R)
    if len(side_a) == 0 or len(side_b) == 0:
        return 0.0
    c = pair.c
    f, scales = _wick_integrand(side_a, side_b, R, c, pair.separation(R))
    integral = _integrate_scaled(f, scales, spec)
    return -c / (2.0 * math.pi * R**7) * integral


def _check_R(R):
    if not (R > 0 and math.isfinite(R)):
        raise InputError(f"distance must be positive and finite, got {R!r}")


def _restrict(side: SpectralSide, labels) -> SpectralSide:
    if labels is None:
        return side
    wanted = set(labels)
    keep = [i for i, lab in enumerate(side.labels) if wanted & set(lab)]
    return SpectralSide(
        tuple(side.labels[i] for i in keep), side.energies[keep], side.first[keep], side.second[keep]
    )


def wick_term_direct(
    pair: PairSystem,
    R: float,
    states_a: Optional[Sequence[str]] = None,
    states_b: Optional[Sequence[str]] = None,
    spec: Optional[QuadratureSpec] = None,
) -> float:
    """Imaginary-axis integral of the direct shift, summed over all virtual states.

    Args:
        pair: the two-atom system.
        R: distance in Bohr.
        states_a: optional subset of atom-A virtual levels (a share of W).
        states_b: optional subset of atom-B virtual levels.
        spec: optional quadrature override.
    """
    side_a, side_b = _direct_sides(pair)
    return _wick(_restrict(side_a, states_a), _restrict(side_b, states_b), pair, R, spec)


def _isotropic_scalar_side(atom, ref):
    states = virtual_states(atom, ref)
    side = direct_side(atom, ref)
    for xi in [0.0] + [abs(e) for e in side.energies]:
        isotropic_part(side.evaluate(1j * xi).real)
    energies = np.array([e for _, e, _ in states])
    weights = np.array([float(d @ d) / 3.0 for _, _, d in states])
    return energies, weights


def wick_term_sstate(pair: PairSystem, R: float, spec: Optional[QuadratureSpec] = None) -> float:
    """Wick term for isotropic reference states using scalar polarizabilities.

    Uses the polynomial u^4 + 2u^3 + 5u^2 + 6u + 3 in u = omega R / c.
    """
    _check_R(R)
    ea, wa = _isotropic_scalar_side(pair.atom_a, pair.ref_a)
    eb, wb = _isotropic_scalar_side(pair.atom_b, pair.ref_b)
    if len(ea) == 0 or len(eb) == 0:
        return 0.0
    c = pair.c

    def f(u):
        xi2 = ((u * (c / R)) ** 2)[:, None]
        alpha_a = (2.0 * wa * ea / (ea * ea + xi2)).sum(axis=1)
        alpha_b = (2.0 * wb * eb / (eb * eb + xi2)).sum(axis=1)
        poly = 3.0 + u * (6.0 + u * (5.0 + u * (2.0 + u)))
        return np.exp(-2.0 * u) * poly * alpha_a * alpha_b

    scales = [abs(e) * R / c for e in np.concatenate([ea, eb])]
    return -c / (math.pi * R**7) * _integrate_scaled(f, scales, spec)


def pole_term_direct(pair: PairSystem, m_A: str, R: float) -> PoleContribution:
    """Residue contribution of the lower level ``m_A`` of atom A."""
    _check_R(R)
    side_a, side_b = _direct_sides(pair)
    return _single_pole(side_a, side_b, pair, m_A, R)


def direct_poles(pair: PairSystem, R: float) -> list:
    """Residues from lower levels of both atoms, atom A first."""
    side_a, side_b = _direct_sides(pair)
    return _poles_of(side_a, side_b, pair, R, "A") + _poles_of(side_b, side_a, pair, R, "B")


def mixing_poles(pair: PairSystem, R: float) -> list:
    side_a, side_b = _mixed_sides(pair)
    return _poles_of(side_a, side_b, pair, R, "A") + _poles_of(side_b, side_a, pair, R, "B")


def total_direct(pair: PairSystem, R: float, spec: Optional[QuadratureSpec] = None) -> ShiftBreakdown:
    """Direct shift W + sum P with widths, as a breakdown without exchange terms."""
    _check_R(R)
    poles = tuple(direct_poles(pair, R))
    wick = wick_term_direct(pair, R, spec=spec)
    total = wick + math.fsum(p.P for p in poles)
    width = math.fsum(p.Gamma for p in poles)
    return ShiftBreakdown(R, wick, poles, None, None, total, total, width, width)


def mixing_wick(pair: PairSystem, R: float, spec: Optional[QuadratureSpec] = None) -> float:
    """Imaginary-axis integral of the exchange term of identical atoms."""
    side_a, side_b = _mixed_sides(pair)
    return _wick(side_a, side_b, pair, R, spec)


def mixing_pole(pair: PairSystem, m_A: str, R: float) -> PoleContribution:
    """Exchange residue from the level ``m_A`` lying below the atom-A reference.

    The numerator is the pole-bearing term of the A-side mixed polarizability
    and the partner is the B-side mixed polarizability at the pole frequency.
    ``argument_asymmetry`` reports how much the result would change if the
    partner were evaluated at the opposite frequency.
    """
    _check_R(R)
    side_a, side_b = _mixed_sides(pair)
    return _single_pole(side_a, side_b, pair, m_A, R)


def total_shift(pair: PairSystem, R: float, spec: Optional[QuadratureSpec] = None) -> ShiftBreakdown:
    """Direct and (for identical atoms) exchange terms with the +- combinations."""
    direct = total_direct(pair, R, spec)
    if not pair.identical:
        return direct
    poles_mix = tuple(mixing_poles(pair, R))
    wick_mix = mixing_wick(pair, R, spec)
    mix = wick_mix + math.fsum(p.P for p in poles_mix)
    width_mix = math.fsum(p.Gamma for p in poles_mix)
    d, w = direct.total_plus, direct.width_total_plus
    return ShiftBreakdown(
        R, direct.wick_dir, direct.poles_dir, wick_mix, poles_mix, d + mix, d - mix, w + width_mix, w - width_mix
    )


# --- limits -------------------------------------------------------------------


def _vdw_sum(side_a: SpectralSide, side_b: SpectralSide, R_vec, tol=DEFAULT_DEGENERACY_TOL) -> float:
    beta = longitudinal_dyadic(R_vec)
    terms = []
    for g, (la, a) in enumerate(zip(side_a.labels, side_a.energies)):
        for h, (lb, b) in enumerate(zip(side_b.labels, side_b.energies)):
            num = contract(beta, beta, side_a.first[g], side_b.second[h]) + contract(
                beta, beta, side_a.second[g], side_b.first[h]
            )
            if num == 0:
                continue
            if abs(a + b) <= tol:
                raise ResonanceError(
                    f"vanishing denominator E({'+'.join(la)}) + E({'+'.join(lb)}) = 0",
                    labels=tuple(la) + tuple(lb),
                )
            terms.append(-0.5 * num / (a + b))
    return math.fsum(terms)


def vdw_limit(pair: PairSystem) -> float:
    """Coefficient of 1/R^6 of the direct shift at short range (negative when attractive)."""
    side_a, side_b = _direct_sides(pair)
    return _vdw_sum(side_a, side_b, pair.separation(1.0))


def mixing_vdw_limit(pair: PairSystem) -> float:
    """Coefficient of 1/R^6 of the exchange term at short range."""
    side_a, side_b = _mixed_sides(pair)
    return _vdw_sum(side_a, side_b, pair.separation(1.0))


def _static(side: SpectralSide) -> np.ndarray:
    return side.evaluate(0.0).real


def _long_wick_coefficient(side_a, side_b, R_vec) -> float:
    aa, ab, bb = symmetric_table(_static(side_a), _static(side_b), R_vec)
    return (3.0 * aa + 5.0 * ab + 5.0 * bb) / (8.0 * math.pi)


def casimir_polder_coefficient(pair: PairSystem, kind: str = "direct") -> float:
    """C7 such that the Wick term approaches -C7 / R^7 at long range."""
    sides = _direct_sides(pair) if kind == "direct" else _mixed_sides(pair)
    return pair.c * _long_wick_coefficient(*sides, pair.separation(1.0))


VALID_SELECTORS = {
    ("wick", "direct", "long"),
    ("pole", "direct", "long"),
    ("width", "direct", "long"),
    ("pole", "direct", "short"),
    ("wick", "direct", "short"),
    ("width", "direct", "short"),
    ("width", "mix", "short"),
    ("wick", "mix", "long"),
    ("pole", "mix", "long"),
    ("width", "mix", "long"),
}


def asymptotic_shift(pair: PairSystem, channel: str, kind: str, regime: str, m_A: Optional[str] = None, R: float = 1.0) -> float:
    """Closed-form short- or long-range limit of one term of the shift.

    Args:
        pair: two-atom system.
        channel: "wick", "pole" or "width".
        kind: "direct" or "mix".
        regime: "short" or "long".
        m_A: lower level of atom A; needed for pole and width channels and
            for the short-range share of the Wick term.
        R: distance in Bohr.
    """
    key = (channel, kind, regime)
    if key not in VALID_SELECTORS:
        raise InputError(f"no closed asymptotic form for channel={channel!r}, kind={kind!r}, regime={regime!r}")
    _check_R(R)
    c = pair.c
    R_vec = pair.separation(R)
    side_a, side_b = _direct_sides(pair) if kind == "direct" else _mixed_sides(pair)
    if key == ("wick", kind, "long"):
        return -c * _long_wick_coefficient(side_a, side_b, R_vec) / R**7
    if m_A is None:
        raise InputError(f"{channel} asymptotics need a lower level m_A")
    group = [g for g, lab in enumerate(side_a.labels) if m_A in lab]
    if not group:
        raise PreconditionError(f"level {m_A!r} is not dipole-connected to the reference")
    g = group[0]
    a = float(side_a.energies[g])
    if key == ("wick", "direct", "short"):
        beta = longitudinal_dyadic(R_vec)
        share = []
        for h, b in enumerate(side_b.energies):
            num = contract(beta, beta, side_a.first[g], side_b.first[h])
            share.append(num * identity_wick_denominators(a, float(b)) / (4.0 * math.pi))
        return -math.fsum(share) / R**6
    if a >= 0:
        raise PreconditionError(f"level {m_A!r} lies above the reference (E = {a:.6g})")
    partner = _partner_at(side_b, -a, side_a.labels[g])
    aa, ab, bb = symmetric_table(side_a.second[g], partner, R_vec)
    x = a * R / c
    if regime == "long":
        amplitude = (a / c) ** 4 * aa / R**2
        if channel == "pole":
            return -amplitude * math.cos(2 * x)
        return -2.0 * amplitude * math.sin(2 * x)
    if channel == "pole":
        return -bb / R**6
    # leading small-x behaviour of the exact width
    return -(4.0 / 3.0) * x**3 * (bb - 3.0 * ab) / R**6


# --- regimes ------------------------------------------------------------------


@dataclass(frozen=True)
class PoleEnvelope:
    state_label: str
    atom: str
    E_m: float
    amplitude: float
    wavenumber: float


@dataclass(frozen=True)
class RegimeReport:
    """Asymptotic coefficients and the pole/Wick crossover of a pair.

    ``c6_tensor_sum`` and ``c7_coefficient`` follow the sign convention
    Delta E -> -C6/R^6 at short range and W -> -C7/R^7 at long range.
    """

    c6_tensor_sum: float
    c7_coefficient: float
    pole_envelopes: tuple
    crossover_radius: Optional[float]
    rule_of_thumb_ratio_at: tuple = ()
    ratio_slope: Optional[float] = None
    wick_slope: Optional[float] = None
    envelope_slope: Optional[float] = None
    extras: dict = field(default_factory=dict)


def pole_envelopes(pair: PairSystem) -> list:
    """Long-range envelopes amplitude / R^2 of the oscillating pole terms."""
    side_a, side_b = _direct_sides(pair)
    R_vec = pair.separation(1.0)
    out = []
    for atom, side, partner in (("A", side_a, side_b), ("B", side_b, side_a)):
        for g, (lab, a) in enumerate(zip(side.labels, side.energies)):
            if a >= 0:
                continue
            aa, _, _ = symmetric_table(side.second[g], _partner_at(partner, -a, lab), R_vec)
            out.append(PoleEnvelope("+".join(lab), atom, float(a), abs((a / pair.c) ** 4 * aa), 2 * abs(a) / pair.c))
    return out


def exact_pole_envelope(pair: PairSystem, R: float) -> float:
    """Sum over lower levels of the envelope |Q| of the exact closed pole forms."""
    return math.fsum(abs(p.Q) for p in direct_poles(pair, R))


def _bisect_log(fun, lo, hi, rel_tol):
    flo = fun(lo)
    if flo * fun(hi) > 0:
        raise ConvergenceError("crossover not bracketed")
    while hi / lo - 1.0 > rel_tol:
        mid = math.sqrt(lo * hi)
        fm = fun(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return math.sqrt(lo * hi)


def _loglog_slope(xs, ys):
    xs, ys = np.log(np.asarray(xs)), np.log(np.abs(np.asarray(ys)))
    return float(np.polyfit(xs, ys, 1)[0])


def casimir_polder_range(pair: PairSystem, R_grid, threshold: float = 10.0) -> list:
    """Grid points where every transition satisfies |E| R / c >= threshold."""
    energies = [abs(e) for atom, ref in ((pair.atom_a, pair.ref_a), (pair.atom_b, pair.ref_b))
                for _, e, _ in virtual_states(atom, ref)]
    if not energies:
        return []
    e_min = min(energies)
    return [float(R) for R in R_grid if e_min * R / pair.c >= threshold]


def crossover_report(pair: PairSystem, R_grid: Sequence[float], rel_tol: float = 1e-6) -> RegimeReport:
    """Asymptotic coefficients, pole envelopes and the pole/Wick crossover radius.

    The crossover solves sum(amplitude)/R^2 = |C7|/R^7 by bisection in log R,
    bracketed around the analytic intersection. The ratio slope is fitted to
    the exact pole envelopes over the quadrature Wick term on the part of
    ``R_grid`` inside the Casimir-Polder range.
    """
    grid = np.asarray(R_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0) or np.any(grid <= 0):
        raise InputError("R_grid must be a strictly increasing list of positive distances")
    c6 = -vdw_limit(pair)
    c7 = casimir_polder_coefficient(pair)
    envs = tuple(pole_envelopes(pair))
    cp = casimir_polder_range(pair, grid)
    wick_slope = None
    if len(cp) >= 3:
        wick_slope = _loglog_slope(cp, [wick_term_direct(pair, R) for R in cp])
    if not envs:
        return RegimeReport(c6, c7, envs, None, (), None, wick_slope, None)
    amp = math.fsum(e.amplitude for e in envs)
    guess = (abs(c7) / amp) ** 0.2
    radius = _bisect_log(lambda R: math.log(amp / R**2) - math.log(abs(c7) / R**7), guess / 2, guess * 2, rel_tol)
    samples, ratio_slope, envelope_slope = [], None, None
    if len(cp) >= 3:
        env = [exact_pole_envelope(pair, R) for R in cp]
        wick = [abs(wick_term_direct(pair, R)) for R in cp]
        ratios = [e / w for e, w in zip(env, wick)]
        ratio_slope = _loglog_slope(cp, ratios)
        envelope_slope = _loglog_slope(cp, env)
        samples = tuple((R, r, (R / pair.c) ** 5) for R, r in zip(cp, ratios))
    return RegimeReport(c6, c7, envs, radius, tuple(samples), ratio_slope, wick_slope, envelope_slope)


def envelope_maxima(pair: PairSystem, m_A: str, x_values: np.ndarray) -> tuple:
    """Local maxima of |P| sampled on a dense grid of x = |E_m| R / c.

    Returns:
        (R, |P|) arrays at the sampled maxima.
    """
    side_a, _ = _direct_sides(pair)
    a = next(float(e) for lab, e in zip(side_a.labels, side_a.energies) if m_A in lab)
    R = np.asarray(x_values) * pair.c / abs(a)
    P = np.array([abs(pole_term_direct(pair, m_A, r).P) for r in R])
    idx = [i for i in range(1, len(P) - 1) if P[i] >= P[i - 1] and P[i] > P[i + 1]]
    return R[idx], P[idx]

