"""Dynamic dipole polarizabilities from a sum over virtual states.

Every tensor here has the two-term sum-over-states shape

    alpha(omega) = sum_g  T1_g / (a_g - omega) + T2_g / (a_g + omega)

where a_g is the virtual-state energy measured from the anchoring reference
level. ``SpectralSide`` stores (a_g, T1_g, T2_g) once so that the shift engine
can evaluate the tensor on the imaginary axis and locate its poles without
repeating the level bookkeeping.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError, PreconditionError
from .model import DEFAULT_DEGENERACY_TOL, AtomModel, degenerate_energy_groups, virtual_states

ISOTROPY_TOL = 1e-10


class Prescription(str, enum.Enum):
    """Which half-plane the counter-rotating pole is pushed into."""

    FEYNMAN = "feynman"
    RETARDED = "retarded"

    @classmethod
    def parse(cls, value) -> "Prescription":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InputError(f"unknown prescription {value!r}; use feynman or retarded") from None


class Anchor(str, enum.Enum):
    """Reference level used for the denominators of a mixed polarizability."""

    A_SIDE = "A"
    B_SIDE = "B"

    @classmethod
    def parse(cls, value) -> "Anchor":
        if isinstance(value, cls):
            return value
        key = str(value).upper().replace("-SIDE", "")
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown anchor {value!r}; use A or B") from None


@dataclass(frozen=True, eq=False)
class PolarizabilityTensor:
    entries: np.ndarray
    omega: complex
    prescription: Prescription

    def scalar(self) -> complex:
        return complex(np.trace(self.entries) / 3.0)


@dataclass(frozen=True)
class PolePlacement:
    """One pole of a polarizability on the real frequency axis.

    ``half_plane`` is +1 when the infinitesimal displacement pushes the pole
    above the real axis and -1 when below.
    """

    labels: tuple
    location: float
    half_plane: int
    term: str


@dataclass(frozen=True, eq=False)
class SpectralSide:
    """Grouped sum-over-states data for one polarizability.

    Attributes:
        labels: member level labels of each group.
        energies: group energies a_g relative to the anchoring level, shape (n,).
        first: numerators of the 1/(a - omega) terms, shape (n, 3, 3).
        second: numerators of the 1/(a + omega) terms, shape (n, 3, 3).
    """

    labels: tuple
    energies: np.ndarray
    first: np.ndarray
    second: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.first, self.second))

    def check_off_pole(self, omega: complex, tol: float = DEFAULT_DEGENERACY_TOL) -> None:
        for lab, a in zip(self.labels, self.energies):
            if abs(a - omega) <= tol or abs(a + omega) <= tol:
                raise DomainError(
                    f"polarizability evaluated on the pole of level(s) {', '.join(lab)} "
                    f"(E = {a:.16g}, omega = {omega:.16g})"
                )

    def evaluate(
        self,
        omega: complex,
        prescription: Prescription = Prescription.FEYNMAN,
        epsilon: float = 0.0,
    ) -> np.ndarray:
        """Tensor value at ``omega``.

        With ``epsilon`` = 0 both prescriptions give the same number and only
        the pole bookkeeping differs; a positive ``epsilon`` displaces the
        poles by that finite amount for inspection purposes.
        """
        omega = complex(omega)
        if epsilon < 0:
            raise InputError("epsilon must be non-negative")
        if epsilon == 0.0:
            self.check_off_pole(omega)
        sign = 1.0 if Prescription.parse(prescription) is Prescription.RETARDED else -1.0
        out = np.zeros((3, 3), dtype=complex)
        for a, t1, t2 in zip(self.energies, self.first, self.second):
            out += t1 / (a - omega - 1j * epsilon) + t2 / (a + omega + sign * 1j * epsilon)
        return out

    def transposed(self) -> "SpectralSide":
        return SpectralSide(
            self.labels,
            self.energies,
            np.transpose(self.first, (0, 2, 1)),
            np.transpose(self.second, (0, 2, 1)),
        )

    def without(self, label: str) -> "SpectralSide":
        keep = [i for i, lab in enumerate(self.labels) if label not in lab]
        return SpectralSide(
            tuple(self.labels[i] for i in keep),
            self.energies[keep],
            self.first[keep],
            self.second[keep],
        )


def _empty_side() -> SpectralSide:
    return SpectralSide((), np.zeros(0), np.zeros((0, 3, 3)), np.zeros((0, 3, 3)))


def direct_side(atom: AtomModel, ref: str, tol: float = DEFAULT_DEGENERACY_TOL) -> SpectralSide:
    """Spectral data of the ordinary polarizability of ``atom`` in level ``ref``."""
    groups = degenerate_energy_groups(atom, ref, tol)
    if not groups:
        return _empty_side()
    dyads = np.array([g.dyadic for g in groups])
    return SpectralSide(
        tuple(g.labels for g in groups),
        np.array([g.energy for g in groups]),
        dyads,
        dyads.copy(),
    )


def mixed_side(
    atom: AtomModel,
    psi_a: str,
    psi_b: str,
    anchor,
    tol: float = DEFAULT_DEGENERACY_TOL,
) -> SpectralSide:
    """Spectral data of the exchange polarizability linking ``psi_a`` and ``psi_b``.

    The first-term numerator is <psi_a|d_i|v><v|d_k|psi_b>, the second-term
    numerator its transpose. Denominators are measured from ``psi_a`` for the
    A-side anchor and from ``psi_b`` for the B-side anchor.
    """
    anchor = Anchor.parse(anchor)
    atom.require(psi_a)
    atom.require(psi_b)
    e_ref = atom.energy(psi_a if anchor is Anchor.A_SIDE else psi_b)
    entries = []
    for lvl in atom.levels:
        left = atom.dipole(psi_a, lvl.label)
        right = atom.dipole(lvl.label, psi_b)
        if not (np.any(left) and np.any(right)):
            continue
        a = lvl.energy - e_ref
        if a == 0.0:
            raise InputError(
                f"level {lvl.label!r} is degenerate with the anchoring reference of a mixed polarizability"
            )
        entries.append((a, lvl.label, np.outer(left, right)))
    entries.sort(key=lambda e: (e[0], e[1]))
    labels, energies, numerators = [], [], []
    for a, label, num in entries:
        if energies and a - energies[-1][-1] <= tol:
            energies[-1].append(a)
            labels[-1].append(label)
            numerators[-1] = numerators[-1] + num
        else:
            energies.append([a])
            labels.append([label])
            numerators.append(num)
    if not labels:
        return _empty_side()
    first = np.array(numerators)
    return SpectralSide(
        tuple(tuple(lab) for lab in labels),
        np.array([math.fsum(e) / len(e) for e in energies]),
        first,
        np.transpose(first, (0, 2, 1)).copy(),
    )


def polarizability_tensor(
    atom: AtomModel,
    ref: str,
    omega: complex,
    presc=Prescription.FEYNMAN,
    epsilon: float = 0.0,
) -> PolarizabilityTensor:
    """Polarizability tensor of ``atom`` in level ``ref`` at complex frequency ``omega``.

    Args:
        atom: atomic model.
        ref: reference level.
        omega: complex frequency (Hartree).
        presc: pole prescription, feynman or retarded.
        epsilon: optional finite pole displacement; zero keeps it infinitesimal.

    Returns:
        PolarizabilityTensor tagged with the prescription.
    """
    presc = Prescription.parse(presc)
    entries = direct_side(atom, ref).evaluate(omega, presc, epsilon)
    return PolarizabilityTensor(entries, complex(omega), presc)


def pole_placements(atom: AtomModel, ref: str, presc=Prescription.FEYNMAN) -> list:
    """Real-axis pole locations of the polarizability and the side each is pushed to."""
    presc = Prescription.parse(presc)
    side = direct_side(atom, ref)
    counter_side = -1 if presc is Prescription.RETARDED else +1
    out = []
    for lab, a in zip(side.labels, side.energies):
        out.append(PolePlacement(lab, float(a), -1, "resonant"))
        out.append(PolePlacement(lab, float(-a), counter_side, "counter-rotating"))
    return out


def isotropic_part(tensor: np.ndarray) -> complex:
    """Return trace/3, raising if the tensor is not a multiple of the identity."""
    scalar = complex(np.trace(tensor) / 3.0)
    anisotropy = float(np.max(np.abs(tensor - scalar * np.eye(3))))
    scale = abs(scalar)
    if anisotropy > ISOTROPY_TOL * scale or (scale == 0.0 and anisotropy > 0.0):
        raise PreconditionError(
            f"polarizability is anisotropic: max deviation from isotropy {anisotropy:.3e} "
            f"relative to scalar part {scale:.3e}"
        )
    return scalar


def scalar_polarizability(atom: AtomModel, ref: str, omega: complex, presc=Prescription.FEYNMAN) -> complex:
    """Scalar polarizability of an isotropic reference state (trace/3)."""
    return isotropic_part(polarizability_tensor(atom, ref, omega, presc).entries)


def static_polarizability(atom: AtomModel, ref: str) -> float:
    """(2/3) sum |d|^2 / E over the virtual states; requires isotropy."""
    isotropic_part(polarizability_tensor(atom, ref, 0.0).entries)
    return (2.0 / 3.0) * math.fsum(float(d @ d) / e for _, e, d in virtual_states(atom, ref))


def mixed_polarizability(
    atom: AtomModel,
    psi_a: str,
    psi_b: str,
    anchor,
    omega: complex,
    presc=Prescription.FEYNMAN,
    epsilon: float = 0.0,
) -> PolarizabilityTensor:
    """Exchange polarizability of identical atoms in levels ``psi_a`` and ``psi_b``.

    For ``psi_a == psi_b`` this is the ordinary polarizability tensor.
    """
    presc = Prescription.parse(presc)
    entries = mixed_side(atom, psi_a, psi_b, anchor).evaluate(omega, presc, epsilon)
    return PolarizabilityTensor(entries, complex(omega), presc)


@dataclass(frozen=True)
class Permittivity:
    """Relative permittivity of a dilute gas with its unit bookkeeping."""

    value: complex
    number_density: float
    polarizability: complex
    epsilon0: float = 1.0 / (4.0 * math.pi)
    prescription: str = Prescription.RETARDED.value
    note: str = "atomic units, 4 pi eps0 = 1 so eps0 = 1/(4 pi)"


def relative_permittivity(
    atom: AtomModel,
    ref: str,
    number_density: float,
    omega: complex,
    epsilon: float = 0.0,
) -> Permittivity:
    """eps_r = 1 + (N / eps0) alpha with the retarded scalar polarizability.

    Args:
        atom: atomic model.
        ref: isotropic reference level.
        number_density: atoms per cubic Bohr.
        omega: frequency.
        epsilon: optional finite pole displacement.
    """
    if not number_density >= 0:
        raise InputError(f"number density must be non-negative, got {number_density!r}")
    tensor = polarizability_tensor(atom, ref, omega, Prescription.RETARDED, epsilon).entries
    alpha = isotropic_part(tensor)
    eps0 = 1.0 / (4.0 * math.pi)
    value = 1.0 + number_density / eps0 * alpha
    return Permittivity(complex(value), float(number_density), alpha, eps0)

