"""Small model atoms used by the tests, the self-check suite and the examples."""

from __future__ import annotations

from .model import AtomModel, PairSystem, UnitsSystem


def two_level_atom(gap: float = 0.5, d: float = 1.0) -> AtomModel:
    """Ground level g and three degenerate sublevels px, py, pz at ``gap``.

    Each sublevel couples to g by a dipole of length ``d`` along its own axis,
    which makes the ground-state polarizability isotropic.
    """
    return AtomModel.build(
        [("g", 0.0, "S"), ("px", gap, "P"), ("py", gap, "P"), ("pz", gap, "P")],
        [
            ("g", "px", (d, 0.0, 0.0)),
            ("g", "py", (0.0, d, 0.0)),
            ("g", "pz", (0.0, 0.0, d)),
        ],
    )


def three_level_atom() -> AtomModel:
    """Reference n at 0, a lower level m at -0.1 and a higher level v at 0.4.

    Both m and v couple to n; the n-m dipole is along x and the n-v dipole along y.
    """
    return AtomModel.build(
        [("n", 0.0), ("m", -0.1), ("v", 0.4)],
        [("n", "m", (1.0, 0.0, 0.0)), ("n", "v", (0.0, 1.0, 0.0))],
    )


def exchange_atom() -> AtomModel:
    """Four levels for exchange tests: g 0, p1 0.2, s 0.3, p2 0.6.

    With references s and g the intermediate p1 lies below s, so the exchange
    term has a pole. Each intermediate level gives a non-symmetric mixed
    numerator, but the antisymmetric parts cancel in the sum over levels, as
    the commutator [d_i, d_k] = 0 requires of a complete set.
    """
    return AtomModel.build(
        [("g", 0.0), ("p1", 0.2), ("s", 0.3), ("p2", 0.6)],
        [
            ("s", "p1", (1.0, 0.0, 0.0)),
            ("p1", "g", (0.0, 1.0, 0.0)),
            ("s", "p2", (0.0, 1.0, 0.0)),
            ("p2", "g", (1.0, 0.0, 0.0)),
        ],
    )


def ground_pair(units: UnitsSystem = UnitsSystem()) -> PairSystem:
    """Two identical two-level atoms, both in the ground state."""
    atom = two_level_atom()
    return PairSystem(atom, atom, "g", "g", identical=False, units=units)


def excited_pair(units: UnitsSystem = UnitsSystem()) -> PairSystem:
    """Three-level atom in its middle level n next to a ground-state two-level atom."""
    return PairSystem(three_level_atom(), two_level_atom(), "n", "g", identical=False, units=units)


def exchange_pair(units: UnitsSystem = UnitsSystem()) -> PairSystem:
    """Identical four-level atoms in levels s (atom A) and g (atom B)."""
    atom = exchange_atom()
    return PairSystem(atom, atom, "s", "g", identical=True, units=units)
