"""Dyadic tensors and the photon propagator between two dipoles.

Dyadics are plain 3x3 numpy arrays. The propagator is evaluated in the mixed
frequency/position representation of the temporal gauge, in atomic units.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError
from .model import UnitsSystem

IDENTITY = np.eye(3)


def _unit(R_vec) -> np.ndarray:
    vec = np.asarray(R_vec, dtype=float)
    if vec.shape != (3,):
        raise InputError(f"separation must be a 3-vector, got shape {vec.shape}")
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise InputError("separation vector must be non-zero")
    return vec / norm


def projector(R_vec) -> np.ndarray:
    """Unit projector n n along the separation."""
    n = _unit(R_vec)
    return np.outer(n, n)


def transverse_dyadic(R_vec) -> np.ndarray:
    """delta_ij - n_i n_j."""
    return IDENTITY - projector(R_vec)


def longitudinal_dyadic(R_vec) -> np.ndarray:
    """delta_ij - 3 n_i n_j."""
    return IDENTITY - 3.0 * projector(R_vec)


def contract(M, N, X, Y):
    """Four-index contraction sum M_ij N_kl X_ik Y_jl.

    Atom A carries the (i, k) pair and atom B the (j, l) pair. Relabelling the
    dummy indices gives contract(M, N, X.T, Y.T) == contract(N, M, X, Y).
    """
    return np.einsum("ij,kl,ik,jl->", M, N, X, Y)


def contraction_table(X, Y, R_vec) -> dict:
    """The dyadic contractions entering every pole and Wick formula.

    Returns a dict with keys "aa", "ab", "ba", "bb" for the
    (transverse, transverse), (transverse, longitudinal), ... pairs.
    """
    a = transverse_dyadic(R_vec)
    b = longitudinal_dyadic(R_vec)
    return {
        "aa": contract(a, a, X, Y),
        "ab": contract(a, b, X, Y),
        "ba": contract(b, a, X, Y),
        "bb": contract(b, b, X, Y),
    }


def frequency_branch(omega: complex) -> complex:
    """sqrt(omega^2 + i0): first-quadrant continuation of |omega|.

    Principal root of omega^2, with the cut approached from above: real
    frequencies map to their absolute value and omega = +-i xi (xi > 0)
    maps to i xi.
    """
    omega = complex(omega)
    if omega == 0:
        raise DomainError("frequency branch undefined at omega = 0")
    sq = omega * omega
    if sq.imag == 0.0 and sq.real < 0.0:
        return 1j * cmath.sqrt(-sq.real).real
    return cmath.sqrt(sq)


@dataclass(frozen=True, eq=False)
class PropagatorTensor:
    entries: np.ndarray
    omega: complex
    separation: np.ndarray


def _check_args(omega, R_vec):
    if complex(omega) == 0:
        raise DomainError("propagator is singular at omega = 0")
    vec = np.asarray(R_vec, dtype=float)
    if vec.shape != (3,) or np.linalg.norm(vec) == 0.0:
        raise DomainError("propagator is singular at zero separation")
    return vec, float(np.linalg.norm(vec))


def photon_propagator(omega: complex, R_vec, units: UnitsSystem = UnitsSystem()) -> PropagatorTensor:
    """Temporal-gauge propagator D_ij(omega, R).

    D = (1/c^2) [alpha + beta (i u - u^2)] exp(i |omega| R / c) / R with
    u = c / (|omega| R) and |omega| from ``frequency_branch``.
    """
    vec, R = _check_args(omega, R_vec)
    c = units.c
    k = frequency_branch(omega)
    u = c / (k * R)
    phase = cmath.exp(1j * k * R / c) / R
    entries = (transverse_dyadic(vec) + longitudinal_dyadic(vec) * (1j * u - u * u)) * (
        phase / (c * c)
    )
    return PropagatorTensor(entries, complex(omega), vec)


def propagator_double_contraction(omega: complex, R: float, units: UnitsSystem = UnitsSystem()) -> complex:
    """Closed form of sum_ij D_ij D_ij.

    Uses the polynomial 2 (1 + 2iu - 5u^2 - 6iu^3 + 3u^4) in u = c/(|omega| R).
    """
    _check_args(omega, (0.0, 0.0, R))
    if R <= 0:
        raise DomainError("separation must be positive")
    c = units.c
    k = frequency_branch(omega)
    u = c / (k * R)
    poly = 1 + u * (2j + u * (-5 + u * (-6j + 3 * u)))
    return 2.0 * cmath.exp(2j * k * R / c) / (R * R) * poly / c**4


def close_range_propagator(omega: complex, R_vec, units: UnitsSystem = UnitsSystem()) -> PropagatorTensor:
    """Static dipole-dipole limit -beta / (omega^2 R^3) of the propagator."""
    vec, R = _check_args(omega, R_vec)
    omega = complex(omega)
    entries = -longitudinal_dyadic(vec) / (omega * omega * R**3)
    return PropagatorTensor(entries, omega, vec)
