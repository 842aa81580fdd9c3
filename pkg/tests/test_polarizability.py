import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdwtails import fixtures
from vdwtails.errors import DomainError, InputError, PreconditionError
from vdwtails.model import AtomModel
from vdwtails.polarizability import (
    Anchor,
    Prescription,
    direct_side,
    isotropic_part,
    mixed_polarizability,
    mixed_side,
    pole_placements,
    polarizability_tensor,
    relative_permittivity,
    scalar_polarizability,
    static_polarizability,
)


def random_atoms():
    energy = st.floats(-1.0, 1.0).filter(lambda e: abs(e) > 0.02)
    comp = st.floats(-2.0, 2.0, allow_nan=False)
    level = st.tuples(energy, st.tuples(comp, comp, comp))
    return st.lists(level, min_size=1, max_size=4).map(
        lambda ls: AtomModel.build(
            [("r", 0.0)] + [(f"l{i}", e) for i, (e, _) in enumerate(ls)],
            [("r", f"l{i}", d) for i, (_, d) in enumerate(ls)],
        )
    )


def test_two_level_static_and_imaginary_axis():
    atom = fixtures.two_level_atom()
    assert static_polarizability(atom, "g") == pytest.approx(4.0, rel=1e-15)
    # 2 E |d|^2 / (E^2 + xi^2) with E = 0.5, xi = 0.5
    assert scalar_polarizability(atom, "g", 0.5j) == pytest.approx(2.0, rel=1e-14)


def test_three_level_frozen_tensor():
    alpha = polarizability_tensor(fixtures.three_level_atom(), "n", 0.2j).entries
    assert np.allclose(alpha, np.diag([-4.0, 4.0, 0.0]), atol=1e-14)


@settings(max_examples=50)
@given(random_atoms(), st.floats(0.01, 3.0), st.floats(-1.0, 1.0))
def test_feynman_even(atom, re, im):
    omega = complex(re, im)
    try:
        plus = polarizability_tensor(atom, "r", omega).entries
        minus = polarizability_tensor(atom, "r", -omega).entries
    except DomainError:
        return
    assert np.allclose(plus, minus, rtol=1e-13, atol=1e-13)
    assert np.allclose(plus, plus.T)


@settings(max_examples=30)
@given(random_atoms(), st.floats(0.01, 5.0))
def test_real_on_imaginary_axis(atom, xi):
    alpha = polarizability_tensor(atom, "r", 1j * xi).entries
    assert np.max(np.abs(alpha.imag)) <= 1e-14 * max(1.0, np.max(np.abs(alpha)))


def test_retarded_is_not_even_at_finite_eps():
    atom = fixtures.two_level_atom()
    plus = polarizability_tensor(atom, "g", 0.3, Prescription.RETARDED, epsilon=1e-2).entries
    minus = polarizability_tensor(atom, "g", -0.3, Prescription.RETARDED, epsilon=1e-2).entries
    assert not np.allclose(plus, minus)
    # retarded response obeys alpha(-w) = conj(alpha(w)) for real w
    assert np.allclose(minus, plus.conj())


def test_prescriptions_agree_without_eps():
    atom = fixtures.three_level_atom()
    f = polarizability_tensor(atom, "n", 0.25, "feynman").entries
    r = polarizability_tensor(atom, "n", 0.25, "retarded").entries
    assert np.array_equal(f, r)


def test_pole_placements():
    feyn = pole_placements(fixtures.three_level_atom(), "n", "feynman")
    ret = pole_placements(fixtures.three_level_atom(), "n", "retarded")
    assert {p.location for p in feyn} == {-0.1, 0.1, 0.4, -0.4}
    assert all(p.half_plane == -1 for p in ret)
    assert sorted(p.half_plane for p in feyn) == [-1, -1, 1, 1]


def test_pole_evaluation_raises():
    with pytest.raises(DomainError, match="pole"):
        polarizability_tensor(fixtures.two_level_atom(), "g", 0.5)


def test_parse_errors():
    with pytest.raises(InputError):
        Prescription.parse("causal")
    with pytest.raises(InputError):
        Anchor.parse("C")
    assert Anchor.parse("b-side") is Anchor.B_SIDE


def test_anisotropic_scalar_rejected():
    with pytest.raises(PreconditionError, match="anisotropic"):
        scalar_polarizability(fixtures.three_level_atom(), "n", 0.1j)
    assert isotropic_part(2.0 * np.eye(3)) == 2.0


def test_mixed_side_structure():
    atom = fixtures.exchange_atom()
    side = mixed_side(atom, "s", "g", "A")
    assert side.labels == (("p1",), ("p2",))
    assert np.allclose(side.energies, [-0.1, 0.3])
    assert np.array_equal(side.second, np.transpose(side.first, (0, 2, 1)))
    # the antisymmetric parts cancel over the complete set
    total = side.first.sum(axis=0)
    assert np.allclose(total, total.T)
    b_side = mixed_side(atom, "s", "g", "B")
    assert np.allclose(b_side.energies, [0.2, 0.6])


@pytest.mark.parametrize("anchor", ["A", "B"])
def test_mixed_equals_direct_for_equal_states(anchor):
    atom = fixtures.exchange_atom()
    for omega in (0.05j, 0.7, 0.13 + 0.2j):
        m = mixed_polarizability(atom, "s", "s", anchor, omega).entries
        d = polarizability_tensor(atom, "s", omega).entries
        assert np.allclose(m, d, rtol=1e-14, atol=0)


def test_direct_side_groups_degenerate_levels():
    side = direct_side(fixtures.two_level_atom(), "g")
    assert len(side) == 1 and side.is_symmetric


def test_permittivity_units():
    atom = fixtures.two_level_atom()
    perm = relative_permittivity(atom, "g", 1e-4, 0.0)
    assert perm.epsilon0 == pytest.approx(1 / (4 * math.pi))
    assert perm.value == pytest.approx(1 + 4 * math.pi * 1e-4 * 4.0, rel=1e-14)
    lossy = relative_permittivity(atom, "g", 1e-4, 0.5, epsilon=1e-3)
    assert lossy.value.imag > 0
    with pytest.raises(InputError):
        relative_permittivity(atom, "g", -1.0, 0.1)
