"""Brute-force cross-checks that share no code path with the shift engine.

* Second-order perturbation theory in the explicit product basis of the two
  atoms, with the static dipole-dipole coupling.
* Direct real-axis integration of the full frequency integral with a finite
  pole displacement eps in every denominator, repeated for several eps and
  extrapolated to eps -> 0.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, InputError, ResonanceError
from .model import AtomModel, PairSystem

RESONANCE_TOL = 1e-12


# --- product-space perturbation theory ----------------------------------------


def _dipole_matrices(atom: AtomModel) -> np.ndarray:
    """Cartesian dipole operators as an array of shape (3, n, n)."""
    index = {lab: i for i, lab in enumerate(atom.labels)}
    n = len(index)
    ops = np.zeros((3, n, n))
    for dip in atom.dipoles:
        i, j = index[dip.from_label], index[dip.to_label]
        for k in range(3):
            ops[k, i, j] = dip.d_vector[k]
            ops[k, j, i] = dip.d_vector[k]
    return ops


def _coupling(pair: PairSystem) -> np.ndarray:
    """R^3 times the dipole-dipole operator, sum_ij (delta_ij - 3 n_i n_j) dA_i (x) dB_j."""
    n = np.array(pair.axis)
    da, db = _dipole_matrices(pair.atom_a), _dipole_matrices(pair.atom_b)
    V = np.zeros((da.shape[1] * db.shape[1],) * 2)
    for i in range(3):
        for j in range(3):
            w = (1.0 if i == j else 0.0) - 3.0 * n[i] * n[j]
            if w != 0.0:
                V += w * np.kron(da[i], db[j])
    return V


def _product_energies(pair: PairSystem) -> np.ndarray:
    ea = np.array([lvl.energy for lvl in pair.atom_a.levels])
    eb = np.array([lvl.energy for lvl in pair.atom_b.levels])
    return (ea[:, None] + eb[None, :]).ravel()


def _second_order(pair: PairSystem, bra: int, ket: int, degenerate: np.ndarray) -> float:
    V = _coupling(pair)
    E = _product_energies(pair)
    E0 = E[ket]
    terms = []
    for n in range(len(E)):
        if degenerate[n]:
            continue
        num = V[bra, n] * V[n, ket]
        if num == 0.0:
            continue
        gap = E[n] - E0
        if abs(gap) <= RESONANCE_TOL:
            raise ResonanceError(f"product state {n} is degenerate with the reference", labels=(str(n),))
        terms.append(-num / gap)
    return math.fsum(terms)


def _index(atom: AtomModel, label: str) -> int:
    return atom.labels.index(label)


def brute_force_vdw(pair: PairSystem) -> float:
    """Coefficient of 1/R^6 from second-order perturbation theory.

    Product states degenerate with the reference (coupled or not) are left out
    of the sum; a degenerate state with a non-zero coupling is a resonance.
    """
    nb = len(pair.atom_b.levels)
    ket = _index(pair.atom_a, pair.ref_a) * nb + _index(pair.atom_b, pair.ref_b)
    E = _product_energies(pair)
    V = _coupling(pair)
    degenerate = np.abs(E - E[ket]) <= RESONANCE_TOL
    for n in np.flatnonzero(degenerate):
        if n != ket and V[n, ket] != 0.0:
            raise ResonanceError("first-order resonant coupling to a degenerate product state", labels=(str(n),))
    return _second_order(pair, ket, ket, degenerate)


def brute_force_exchange(pair: PairSystem) -> float:
    """Off-diagonal second-order element between |psi_A psi_B> and |psi_B psi_A>.

    For identical atoms this is the 1/R^6 coefficient of the exchange term.
    """
    if not pair.identical:
        raise InputError("exchange coupling needs identical atoms")
    nb = len(pair.atom_b.levels)
    ia, ib = _index(pair.atom_a, pair.ref_a), _index(pair.atom_b, pair.ref_b)
    ket, bra = ia * nb + ib, ib * nb + ia
    E = _product_energies(pair)
    degenerate = np.abs(E - E[ket]) <= RESONANCE_TOL
    return _second_order(pair, bra, ket, degenerate)


# --- eps-displaced real-axis integration --------------------------------------


@dataclass(frozen=True)
class ContourSpec:
    """Finite pole displacements and integration settings.

    Attributes:
        epsilon_values: decreasing displacements; None picks
            (1e-2, 5e-3, 2.5e-3) times the smallest gap.
        panel_density: extra breakpoints placed at p +- eps * 4^k around each pole.
        extrapolation_order: number of powers of eps removed (at most len - 1).
        rel_tol: relative tolerance passed to the integrator.
    """

    epsilon_values: Optional[Sequence[float]] = None
    panel_density: int = 4
    extrapolation_order: int = 2
    rel_tol: float = 1e-11

    def __post_init__(self):
        if self.epsilon_values is not None:
            eps = list(self.epsilon_values)
            if len(eps) < 3:
                raise InputError("extrapolation needs at least three eps values")
            if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
                raise InputError("eps values must be positive and strictly decreasing")
            if self.extrapolation_order > len(eps) - 1:
                raise InputError("extrapolation order exceeds the number of eps values")


def _levels(atom: AtomModel, ref: str):
    e_ref = atom.energy(ref)
    out = []
    for lvl in atom.levels:
        if lvl.label == ref:
            continue
        d = atom.dipole(ref, lvl.label)
        if np.any(d):
            out.append((lvl.label, lvl.energy - e_ref, d))
    return out


def _smallest_gap(pair: PairSystem) -> float:
    ea = [e for _, e, _ in _levels(pair.atom_a, pair.ref_a)]
    eb = [e for _, e, _ in _levels(pair.atom_b, pair.ref_b)]
    poles = sorted({abs(e) for e in ea + eb})
    gaps = list(poles) + [b - a for a, b in zip(poles, poles[1:])]
    gaps += [abs(a + b) for a in ea for b in eb]
    gaps = [g for g in gaps if g > 0]
    if not gaps:
        raise DomainError("no transition energies")
    return min(gaps)


def default_epsilons(pair: PairSystem) -> tuple:
    gap = _smallest_gap(pair)
    return (1e-2 * gap, 5e-3 * gap, 2.5e-3 * gap)


class _Integrand:
    """(i / 2 pi) omega^4 D_ij D_kl alphaA_ik alphaB_jl with finite eps."""

    def __init__(self, pair: PairSystem, R: float, eps: float):
        self.c = pair.c
        self.R = R
        self.eps = eps
        n = np.array(pair.axis)
        la, lb = _levels(pair.atom_a, pair.ref_a), _levels(pair.atom_b, pair.ref_b)
        self.terms = []
        for _, a, da in la:
            for _, b, db in lb:
                dd = float(da @ db)
                na, nb = float(n @ da), float(n @ db)
                self.terms.append((a, b, dd * dd, 2.0 * dd * na * nb, na * na * nb * nb))

    def __call__(self, w: complex) -> complex:
        c, R, eps = self.c, self.R, self.eps
        f1 = w * w + 1j * w * c / R - c * c / (R * R)
        f2 = -w * w - 3j * w * c / R + 3 * c * c / (R * R)
        total = 0j
        for a, b, cdd, cdn, cnn in self.terms:
            sa = 1.0 / (a - w - 1j * eps) + 1.0 / (a + w - 1j * eps)
            sb = 1.0 / (b - w - 1j * eps) + 1.0 / (b + w - 1j * eps)
            total += sa * sb * (f1 * f1 * cdd + f1 * f2 * cdn + f2 * f2 * cnn)
        pref = cmath.exp(2j * w * R / c) / (c**4 * R * R)
        return 1j / (2 * math.pi) * pref * total


def contour_shift_at(pair: PairSystem, R: float, eps: float, spec: ContourSpec = ContourSpec()) -> complex:
    """Real-axis value of the direct shift for one finite displacement ``eps``.

    The axis is integrated up to Omega = 20 max|E|; the remainder is taken
    along the vertical ray Omega + i t, where the integrand decays like
    exp(-2 t R / c) and which encloses no poles.
    """
    if not R > 0:
        raise InputError("distance must be positive")
    f = _Integrand(pair, R, eps)
    if not f.terms:
        return 0j
    energies = [abs(t[0]) for t in f.terms] + [abs(t[1]) for t in f.terms]
    omega_max = 20.0 * max(energies)
    pts = set()
    for p in set(energies):
        pts.add(p)
        for k in range(spec.panel_density):
            for s in (-1.0, 1.0):
                q = p + s * eps * 4.0**k
                if 0.0 < q < omega_max:
                    pts.add(q)
    pts = sorted(pts)
    # Near-cancelling oscillations can trip the roundoff detector well below
    # the accuracy the eps extrapolation needs; the result is still usable.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        real_part, _ = integrate.quad(
            f, 0.0, omega_max, points=pts, limit=20000, epsabs=0.0, epsrel=spec.rel_tol, complex_func=True
        )
        ray, _ = integrate.quad(
            lambda t: 1j * f(omega_max + 1j * t), 0.0, np.inf, limit=2000, epsabs=0.0, epsrel=spec.rel_tol,
            complex_func=True,
        )
    return complex(real_part + ray)


def richardson(values: Sequence[complex], ratio: float = 2.0, order: int = 2) -> complex:
    """Remove the first ``order`` powers of eps from values at eps, eps/r, eps/r^2, ..."""
    table = [complex(v) for v in values]
    for k in range(1, order + 1):
        factor = ratio**k
        table = [(factor * fine - coarse) / (factor - 1.0) for coarse, fine in zip(table, table[1:])]
    return table[-1]


def contour_shift_direct(pair: PairSystem, R: float, spec: ContourSpec = ContourSpec()) -> complex:
    """eps-extrapolated direct shift W + sum P - (i/2) sum Gamma from the real axis.

    Raises:
        DomainError: when the largest eps is not well below the smallest gap.
    """
    eps = list(spec.epsilon_values) if spec.epsilon_values is not None else list(default_epsilons(pair))
    gap = _smallest_gap(pair)
    if eps[0] > 0.1 * gap:
        raise DomainError(f"eps = {eps[0]:.3g} does not resolve poles separated by {gap:.3g}")
    ratios = [a / b for a, b in zip(eps, eps[1:])]
    if not np.allclose(ratios, ratios[0], rtol=1e-12):
        raise InputError("eps values must form a geometric sequence for extrapolation")
    values = [contour_shift_at(pair, R, e, spec) for e in eps]
    return richardson(values, ratios[0], spec.extrapolation_order)
