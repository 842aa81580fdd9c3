"""Atomic structure inputs: levels, dipole matrix elements and two-atom systems.

Everything is expressed in Hartree atomic units (hbar = e = 4 pi eps0 = 1),
so the speed of light is the only free constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InputError

SPEED_OF_LIGHT_AU = 137.035999
DEFAULT_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class UnitsSystem:
    """Hartree atomic units with an adjustable speed of light."""

    c: float = SPEED_OF_LIGHT_AU
    hbar: float = field(default=1.0, init=False)
    e_charge: float = field(default=1.0, init=False)
    four_pi_eps0: float = field(default=1.0, init=False)

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise InputError(f"speed of light must be positive and finite, got {self.c!r}")

    @property
    def eps0(self) -> float:
        return self.four_pi_eps0 / (4.0 * math.pi)


@dataclass(frozen=True)
class AtomLevel:
    label: str
    energy: float
    symmetry_tag: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.label, str) or not self.label:
            raise InputError(f"level label must be a non-empty string, got {self.label!r}")
        if not math.isfinite(self.energy):
            raise InputError(f"level {self.label!r} has non-finite energy {self.energy!r}")
        object.__setattr__(self, "energy", float(self.energy))


@dataclass(frozen=True)
class DipoleElement:
    """Real dipole matrix element <from|d|to>, equal to <to|d|from>."""

    from_label: str
    to_label: str
    d_vector: tuple

    def __post_init__(self):
        vec = tuple(float(x) for x in self.d_vector)
        if len(vec) != 3:
            raise InputError(
                f"dipole {self.from_label}->{self.to_label} needs 3 components, got {len(vec)}"
            )
        if not all(math.isfinite(x) for x in vec):
            raise InputError(f"dipole {self.from_label}->{self.to_label} has non-finite components")
        if self.from_label == self.to_label:
            raise InputError(f"permanent dipole on level {self.from_label!r} is not supported")
        object.__setattr__(self, "d_vector", vec)

    def connects(self, label: str) -> bool:
        return label in (self.from_label, self.to_label)

    def partner(self, label: str) -> str:
        return self.to_label if label == self.from_label else self.from_label


@dataclass(frozen=True)
class AtomModel:
    """A finite set of levels and the dipole elements linking them."""

    levels: tuple
    dipoles: tuple = ()

    def __post_init__(self):
        levels = tuple(self.levels)
        dipoles = tuple(self.dipoles)
        if not levels:
            raise InputError("an atom needs at least one level")
        labels = [lvl.label for lvl in levels]
        if len(set(labels)) != len(labels):
            dup = sorted({x for x in labels if labels.count(x) > 1})
            raise InputError(f"duplicate level labels: {', '.join(dup)}")
        known = set(labels)
        seen = set()
        for dip in dipoles:
            for lab in (dip.from_label, dip.to_label):
                if lab not in known:
                    raise InputError(f"dipole references unknown level {lab!r}")
            key = frozenset((dip.from_label, dip.to_label))
            if key in seen:
                raise InputError(
                    f"dipole between {dip.from_label!r} and {dip.to_label!r} given twice"
                )
            seen.add(key)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "dipoles", dipoles)

    @classmethod
    def build(cls, levels: Iterable[tuple], dipoles: Iterable[tuple] = ()) -> "AtomModel":
        """Convenience constructor from plain tuples.

        Args:
            levels: (label, energy) or (label, energy, symmetry_tag) tuples.
            dipoles: (from, to, (dx, dy, dz)) tuples.
        """
        lv = tuple(AtomLevel(*entry) for entry in levels)
        dp = tuple(DipoleElement(a, b, tuple(vec)) for a, b, vec in dipoles)
        return cls(lv, dp)

    @property
    def labels(self) -> tuple:
        return tuple(lvl.label for lvl in self.levels)

    def energy(self, label: str) -> float:
        for lvl in self.levels:
            if lvl.label == label:
                return lvl.energy
        raise InputError(f"unknown level label {label!r}")

    def require(self, label: str) -> None:
        self.energy(label)

    def dipole(self, a: str, b: str) -> np.ndarray:
        """Return <a|d|b> as a 3-vector (zero when no element is listed)."""
        self.require(a)
        self.require(b)
        for dip in self.dipoles:
            if {dip.from_label, dip.to_label} == {a, b} and a != b:
                return np.array(dip.d_vector)
        return np.zeros(3)

    def couplings(self, ref: str) -> list:
        """Levels dipole-coupled to ``ref`` as (label, E_level - E_ref, d) in level order."""
        e_ref = self.energy(ref)
        out = []
        for lvl in self.levels:
            if lvl.label == ref:
                continue
            d = self.dipole(ref, lvl.label)
            if not np.any(d):
                continue
            out.append((lvl.label, lvl.energy - e_ref, d))
        return out

    def scaled(self, factor: float) -> "AtomModel":
        """Same levels, every dipole vector multiplied by ``factor``."""
        dp = tuple(
            DipoleElement(d.from_label, d.to_label, tuple(factor * x for x in d.d_vector))
            for d in self.dipoles
        )
        return AtomModel(self.levels, dp)

    def without_dipole(self, a: str, b: str) -> "AtomModel":
        dp = tuple(d for d in self.dipoles if {d.from_label, d.to_label} != {a, b})
        return AtomModel(self.levels, dp)


@dataclass(frozen=True, eq=False)
class VirtualGroup:
    """Virtual states sharing one pole location.

    ``energy`` is measured from the reference level; ``dyadic`` is the sum of
    the outer products d d of the member states.
    """

    labels: tuple
    energy: float
    dyadic: np.ndarray


def virtual_states(atom: AtomModel, ref: str) -> list:
    """All dipole-connected levels as (label, E_v - E_ref, d)."""
    states = atom.couplings(ref)
    for label, e_rel, _ in states:
        if e_rel == 0.0:
            raise InputError(
                f"level {label!r} is degenerate with reference {ref!r} and dipole-coupled to it"
            )
    return states


def lower_virtual_states(atom: AtomModel, ref: str) -> list:
    """Dipole-connected levels strictly below the reference.

    Returns:
        list of (label, E_m) with E_m = E_level - E_ref < 0; empty for a ground state.
    """
    return [(label, e) for label, e, _ in virtual_states(atom, ref) if e < 0]


def higher_virtual_states(atom: AtomModel, ref: str) -> list:
    return [(label, e) for label, e, _ in virtual_states(atom, ref) if e > 0]


def degenerate_energy_groups(
    atom: AtomModel, ref: str, tol: float = DEFAULT_DEGENERACY_TOL
) -> list:
    """Cluster virtual states whose energies lie within ``tol`` of a neighbour.

    Args:
        atom: the atomic model.
        ref: reference level label.
        tol: clustering tolerance in Hartree (single linkage on sorted energies).

    Returns:
        list of VirtualGroup sorted by energy.
    """
    if tol < 0:
        raise InputError("degeneracy tolerance must be non-negative")
    states = sorted(virtual_states(atom, ref), key=lambda s: (s[1], s[0]))
    clusters: list = []
    for state in states:
        if clusters and state[1] - clusters[-1][-1][1] <= tol:
            clusters[-1].append(state)
        else:
            clusters.append([state])
    groups = []
    for members in clusters:
        dyadic = np.zeros((3, 3))
        for _, _, d in members:
            dyadic += np.outer(d, d)
        energy = math.fsum(m[1] for m in members) / len(members)
        groups.append(VirtualGroup(tuple(m[0] for m in members), energy, dyadic))
    return groups


def _unit_axis(axis: Sequence[float]) -> tuple:
    vec = np.asarray(axis, dtype=float)
    norm = float(np.linalg.norm(vec))
    if vec.shape != (3,) or not math.isfinite(norm) or norm == 0.0:
        raise InputError(f"pair axis must be a non-zero 3-vector, got {tuple(axis)!r}")
    return tuple(float(x) for x in vec / norm)


@dataclass(frozen=True)
class PairSystem:
    """Two atoms in given reference states, separated along ``axis``.

    ``identical`` marks a pair of identical atoms, for which the exchange
    (mixing) terms are defined.
    """

    atom_a: AtomModel
    atom_b: AtomModel
    ref_a: str
    ref_b: str
    identical: bool = False
    units: UnitsSystem = UnitsSystem()
    axis: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        self.atom_a.require(self.ref_a)
        self.atom_b.require(self.ref_b)
        if self.identical and self.atom_a != self.atom_b:
            raise InputError("pair marked identical but the two atom models differ")
        object.__setattr__(self, "axis", _unit_axis(self.axis))

    @property
    def c(self) -> float:
        return self.units.c

    def separation(self, R: float) -> np.ndarray:
        return float(R) * np.array(self.axis)

    def swapped(self) -> "PairSystem":
        """The same system with the roles of the two atoms exchanged."""
        return PairSystem(
            self.atom_b, self.atom_a, self.ref_b, self.ref_a, self.identical, self.units, self.axis
        )
