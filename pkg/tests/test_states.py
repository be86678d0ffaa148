"""Core state model: bases, canonicalization, presets."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import nolabel as nl
from conftest import BOTH, random_product, random_superposition

# ---------------------------------------------------------------------------
# Statistics and basis plumbing
# ---------------------------------------------------------------------------


def test_statistics_values():
    assert nl.Statistics.BOSONS.eta == 1
    assert nl.Statistics.FERMIONS.eta == -1
    assert nl.Statistics.coerce("bosons") is nl.Statistics.BOSONS
    assert nl.Statistics.coerce(-1) is nl.Statistics.FERMIONS
    with pytest.raises(nl.StructureError):
        nl.Statistics.coerce(2)
    with pytest.raises(nl.StructureError):
        nl.Statistics.coerce("anyons")


def test_basis_validation():
    with pytest.raises(nl.StructureError):
        nl.ModeBasis(("A", "A"))
    with pytest.raises(nl.StructureError):
        nl.ModeBasis(("A",), (("spin", ()),))
    b = nl.ModeBasis(("A", "B"), (("spin", ("up", "down")), ("path", ("0", "1", "2"))))
    assert b.dim == 12
    assert b.internal_configs[0] == (0, 0)
    assert b.config_label((1, 2)) == "down,2"
    assert b.flat_index("B", (1, 0)) == 6 + 3


def test_basis_kets_are_orthonormal(basis):
    up_l = basis.ket("L", spin="up")
    down_l = basis.ket("L", spin="down")
    up_r = basis.ket("R", spin="up")
    assert nl.overlap(up_l, up_l) == pytest.approx(1)
    assert nl.overlap(up_l, down_l) == 0
    assert nl.overlap(up_l, up_r) == 0


def test_region_validation(basis):
    with pytest.raises(nl.StructureError):
        nl.Region(frozenset())
    with pytest.raises(nl.BasisMismatchError):
        nl.Region.of("Q").validate(basis)
    nl.Region.of("L", "R").validate(basis)


def test_product_ket_structure(basis):
    with pytest.raises(nl.StructureError):
        nl.ProductKet(1.0, ())
    other = nl.ModeBasis(("X",))
    with pytest.raises(nl.BasisMismatchError):
        nl.ProductKet(1.0, (basis.ket("A", spin="up"), other.ket("X")))


def test_nstate_rejects_mixed_particle_numbers(basis):
    one = nl.ProductKet(1.0, (basis.ket("A", spin="up"),))
    two = nl.ProductKet(1.0, (basis.ket("A", spin="up"), basis.ket("B", spin="down")))
    with pytest.raises(nl.StructureError):
        nl.NState(nl.Statistics.BOSONS, (one, two))


def test_ensemble_weight_validation(basis):
    state = nl.build_preset("product_AB", "fermions", basis=basis)
    with pytest.raises(nl.StructureError):
        nl.Ensemble(((0.4, state), (0.4, state)))
    with pytest.raises(nl.StructureError):
        nl.Ensemble(((1.5, state), (-0.5, state)))
    nl.Ensemble(((0.5, state), (0.5, state)))


# ---------------------------------------------------------------------------
# Canonicalization
# ---------------------------------------------------------------------------


def test_fermion_swap_flips_sign(basis):
    psi1 = basis.ket("A", spin="up")
    psi2 = basis.ket("B", spin="down")
    swapped = nl.canonicalize(nl.NState.product("fermions", (psi2, psi1)))
    direct = nl.canonicalize(nl.NState.product("fermions", (psi1, psi2)))
    assert swapped.terms[0].factors == direct.terms[0].factors
    assert swapped.terms[0].coefficient == pytest.approx(-direct.terms[0].coefficient)


def test_fermion_double_occupancy_has_zero_norm(basis):
    psi = basis.ket("A", spin="up")
    state = nl.canonicalize(nl.NState.product("fermions", (psi, psi)))
    assert state.terms  # the ket survives canonicalization ...
    assert nl.norm(state) == 0  # ... but carries no weight


def test_boson_swapped_terms_merge(basis):
    psi1 = basis.ket("A", spin="up")
    psi2 = basis.ket("B", spin="down")
    state = nl.NState.product("bosons", (psi1, psi2)) + nl.NState.product("bosons", (psi2, psi1))
    merged = nl.canonicalize(state)
    assert len(merged.terms) == 1
    assert merged.terms[0].coefficient == pytest.approx(2)


def test_opposite_terms_cancel(basis):
    psi1 = basis.ket("A", spin="up")
    psi2 = basis.ket("B", spin="down")
    state = nl.NState.product("fermions", (psi1, psi2)) + nl.NState.product("fermions", (psi2, psi1))
    assert nl.canonicalize(state).is_zero


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.sampled_from(BOTH),
    st.integers(min_value=1, max_value=3),
)
def test_canonicalize_idempotent(seed, statistics, n):
    rng = np.random.default_rng(seed)
    basis = nl.default_protocol_basis()
    state = random_superposition(basis, rng, statistics, n=n, terms=3)
    once = nl.canonicalize(state)
    twice = nl.canonicalize(once)
    assert len(once.terms) == len(twice.terms)
    for a, b in zip(once.terms, twice.terms):
        assert a.factors == b.factors
        assert a.coefficient == b.coefficient


@pytest.mark.parametrize("statistics", BOTH)
def test_canonicalize_preserves_inner_products(basis, rng, statistics):
    for _ in range(10):
        state = random_superposition(basis, rng, statistics, n=3, terms=3)
        probe = random_product(basis, rng, statistics, n=3)
        before = nl.inner_product(probe, state)
        after = nl.inner_product(probe, nl.canonicalize(state))
        assert before == pytest.approx(after, abs=1e-9)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def test_product_preset_is_normalized():
    state = nl.build_preset("product_AB", "fermions")
    assert nl.norm(state) == pytest.approx(1, abs=1e-12)
    assert len(state.terms) == 1


@pytest.mark.parametrize("statistics", BOTH)
def test_bell_presets_are_normalized(statistics):
    for name in ("bell_singlet", "bell_triplet"):
        state = nl.build_preset(name, statistics)
        assert nl.norm(state) == pytest.approx(1, abs=1e-12)


def test_singlet_on_one_mode_doubles():
    # Forcing both constituents onto mode A turns the fermionic singlet into
    # sqrt(2)|A up, A down>; expanding the permutation sum by hand over the
    # 2x2 overlap matrices gives <Psi|Psi> = (1 + 1 + 1 + 1)/2 = 2.
    state = nl.build_preset("bell_singlet", "fermions", modes=("A", "A"))
    assert nl.inner_product(state, state) == pytest.approx(2, abs=1e-12)
    assert nl.norm(state) == pytest.approx(np.sqrt(2), abs=1e-12)


def test_custom_preset_terms():
    state = nl.build_preset(
        "custom",
        "bosons",
        terms=[
            (0.6, [("A", {"spin": "up"}), ("B", {"spin": "up"})]),
            (0.8, [("A", {"spin": "down"}), ("B", {"spin": "down"})]),
        ],
    )
    assert nl.norm(state) == pytest.approx(1, abs=1e-12)


def test_custom_preset_members_build_ensemble():
    mixture = nl.build_preset(
        "custom",
        "fermions",
        members=[
            (0.5, [(1.0, [("A", {"spin": "up"}), ("B", {"spin": "down"})])]),
            (0.5, [(1.0, [("A", {"spin": "down"}), ("B", {"spin": "up"})])]),
        ],
    )
    assert isinstance(mixture, nl.Ensemble)
    assert len(mixture.members) == 2


def test_unknown_preset_rejected():
    with pytest.raises(nl.StructureError, match="unknown preset"):
        nl.build_preset("ghz", "bosons")
