import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdwtails import fixtures
from vdwtails.errors import InputError
from vdwtails.model import (
    AtomLevel,
    AtomModel,
    DipoleElement,
    PairSystem,
    UnitsSystem,
    degenerate_energy_groups,
    higher_virtual_states,
    lower_virtual_states,
    virtual_states,
)


def test_units_defaults():
    u = UnitsSystem()
    assert u.c == 137.035999
    assert u.eps0 == pytest.approx(1 / (4 * math.pi), rel=1e-15)


@pytest.mark.parametrize("c", [0.0, -1.0, float("inf"), float("nan")])
def test_units_reject_bad_c(c):
    with pytest.raises(InputError):
        UnitsSystem(c)


def test_level_and_dipole_validation():
    with pytest.raises(InputError):
        AtomLevel("", 0.0)
    with pytest.raises(InputError):
        AtomLevel("a", float("nan"))
    with pytest.raises(InputError):
        DipoleElement("a", "a", (1.0, 0.0, 0.0))
    with pytest.raises(InputError):
        DipoleElement("a", "b", (1.0, float("inf"), 0.0))


def test_atom_validation():
    with pytest.raises(InputError):
        AtomModel.build([])
    with pytest.raises(InputError, match="duplicate"):
        AtomModel.build([("a", 0.0), ("a", 1.0)])
    with pytest.raises(InputError, match="unknown level"):
        AtomModel.build([("a", 0.0)], [("a", "b", (1, 0, 0))])
    with pytest.raises(InputError, match="given twice"):
        AtomModel.build([("a", 0.0), ("b", 1.0)], [("a", "b", (1, 0, 0)), ("b", "a", (0, 1, 0))])


def test_dipole_is_symmetric_and_zero_when_absent():
    atom = fixtures.three_level_atom()
    assert np.array_equal(atom.dipole("n", "m"), atom.dipole("m", "n"))
    assert not np.any(atom.dipole("m", "v"))
    with pytest.raises(InputError):
        atom.dipole("n", "zz")


def test_virtual_state_split():
    atom = fixtures.three_level_atom()
    assert lower_virtual_states(atom, "n") == [("m", -0.1)]
    assert higher_virtual_states(atom, "n") == [("v", 0.4)]
    assert lower_virtual_states(fixtures.two_level_atom(), "g") == []


def test_coupled_degenerate_level_rejected():
    atom = AtomModel.build([("a", 0.0), ("b", 0.0)], [("a", "b", (1, 0, 0))])
    with pytest.raises(InputError, match="degenerate"):
        virtual_states(atom, "a")


def test_degenerate_groups_merge_triplet():
    groups = degenerate_energy_groups(fixtures.two_level_atom(), "g")
    assert len(groups) == 1
    assert groups[0].labels == ("px", "py", "pz")
    assert groups[0].energy == 0.5
    assert np.array_equal(groups[0].dyadic, np.eye(3))


def test_degenerate_groups_respect_tolerance():
    atom = AtomModel.build(
        [("g", 0.0), ("a", 0.5), ("b", 0.5 + 1e-9)], [("g", "a", (1, 0, 0)), ("g", "b", (0, 1, 0))]
    )
    assert len(degenerate_energy_groups(atom, "g")) == 2
    assert len(degenerate_energy_groups(atom, "g", tol=1e-6)) == 1


def test_pair_validation_and_swap():
    with pytest.raises(InputError):
        PairSystem(fixtures.three_level_atom(), fixtures.two_level_atom(), "x", "g")
    with pytest.raises(InputError, match="identical"):
        PairSystem(fixtures.three_level_atom(), fixtures.two_level_atom(), "n", "g", identical=True)
    with pytest.raises(InputError):
        PairSystem(fixtures.two_level_atom(), fixtures.two_level_atom(), "g", "g", axis=(0, 0, 0))
    pair = fixtures.excited_pair()
    sw = pair.swapped()
    assert (sw.ref_a, sw.ref_b) == ("g", "n")
    assert sw.swapped() == pair


@given(st.tuples(*[st.floats(-10, 10, allow_nan=False) for _ in range(3)]).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_axis_is_normalised(axis):
    pair = PairSystem(fixtures.two_level_atom(), fixtures.two_level_atom(), "g", "g", axis=axis)
    assert np.linalg.norm(pair.axis) == pytest.approx(1.0, abs=1e-15)
    assert np.linalg.norm(pair.separation(7.0)) == pytest.approx(7.0, rel=1e-15)


@settings(max_examples=30)
@given(st.floats(0.1, 10.0))
def test_scaled_dipoles(factor):
    atom = fixtures.three_level_atom().scaled(factor)
    assert np.allclose(atom.dipole("n", "v"), factor * np.array([0.0, 1.0, 0.0]))
