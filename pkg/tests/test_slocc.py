"""Coincidence postselection, labeled outputs, and the exchange phase."""

import numpy as np
import pytest

import nolabel as nl
from nolabel import Region, SloccRegions, reference
from conftest import BOTH

SQ2 = 1 / np.sqrt(2)


@pytest.fixture
def lr():
    return SloccRegions.of(("L",), ("R",))


def deformed_pair(basis, statistics, l, r, lp, rp):
    state = nl.build_preset("product_AB", statistics, basis=basis)
    return nl.deform(nl.two_mode_overlap(basis, l, r, lp, rp), state)


def random_amplitudes(rng):
    l = rng.uniform(0.05, 0.95) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    lp = rng.uniform(0.05, 0.95) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    r = np.sqrt(1 - abs(l) ** 2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    rp = np.sqrt(1 - abs(lp) ** 2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    return l, r, lp, rp


# ---------------------------------------------------------------------------
# projector structure
# ---------------------------------------------------------------------------


def test_two_region_spin_half_projector_has_four_terms(basis, lr):
    assert nl.slocc_projector(basis, "fermions", lr).rank == 4


def test_single_region_spinless_projector_is_rank_one():
    basis = nl.ModeBasis(("L",))
    projector = nl.slocc_projector(basis, "bosons", SloccRegions.of(("L",)))
    assert projector.rank == 1


def test_three_region_spin_half_projector_has_eight_terms():
    basis = nl.ModeBasis(("S1", "S2", "S3"), (("spin", ("up", "down")),))
    regions = SloccRegions.of(("S1",), ("S2",), ("S3",))
    assert nl.slocc_projector(basis, "fermions", regions).rank == 8


def test_overlapping_regions_rejected():
    with pytest.raises(nl.StructureError):
        SloccRegions.of(("L",), ("L", "R"))


def test_multi_mode_region_state_is_uniform(basis):
    psi = nl.region_mode_state(basis, Region.of("L", "R"), (0,))
    assert psi.amplitude("L", spin="up") == pytest.approx(SQ2)
    assert psi.amplitude("R", spin="up") == pytest.approx(SQ2)
    assert psi.norm() == pytest.approx(1)


# ---------------------------------------------------------------------------
# pure postselection
# ---------------------------------------------------------------------------


def test_no_overlap_passes_through(basis, lr):
    labeled, probability = nl.slocc_postselect_pure(deformed_pair(basis, "fermions", 1, 0, 0, 1), lr)
    assert probability == pytest.approx(1, abs=1e-12)
    up, down = basis.internal_configs[0], basis.internal_configs[1]
    assert abs(labeled.amplitude((up, down))) == pytest.approx(1, abs=1e-12)
    assert labeled.amplitude((down, up)) == pytest.approx(0, abs=1e-12)


def test_maximal_overlap_makes_the_balanced_state(basis, lr):
    labeled, probability = nl.slocc_postselect_pure(deformed_pair(basis, "bosons", SQ2, SQ2, SQ2, SQ2), lr)
    assert probability == pytest.approx(0.5, abs=1e-9)
    up, down = basis.internal_configs[0], basis.internal_configs[1]
    ratio = labeled.amplitude((down, up)) / labeled.amplitude((up, down))
    assert ratio == pytest.approx(1, abs=1e-9)
    assert abs(labeled.amplitude((up, down))) == pytest.approx(SQ2, abs=1e-9)


@pytest.mark.parametrize("statistics", BOTH)
def test_postselection_matches_closed_form(basis, rng, statistics, lr):
    up, down = basis.internal_configs[0], basis.internal_configs[1]
    for _ in range(20):
        l, r, lp, rp = random_amplitudes(rng)
        labeled, probability = nl.slocc_postselect_pure(deformed_pair(basis, statistics, l, r, lp, rp), lr)
        z = abs(l * rp) ** 2 + abs(lp * r) ** 2
        assert probability == pytest.approx(z, abs=1e-9)
        expected_direct = l * rp / np.sqrt(z)
        expected_crossed = statistics.eta * lp * r / np.sqrt(z)
        # output is defined up to a global phase; compare the invariant pieces
        direct, crossed = labeled.amplitude((up, down)), labeled.amplitude((down, up))
        assert abs(direct) == pytest.approx(abs(expected_direct), abs=1e-9)
        assert crossed / direct == pytest.approx(expected_crossed / expected_direct, abs=1e-9)
        assert labeled.amplitude((up, up)) == pytest.approx(0, abs=1e-9)
        assert labeled.amplitude((down, down)) == pytest.approx(0, abs=1e-9)


@pytest.mark.parametrize("statistics", BOTH)
def test_postselection_matches_symmetrization_oracle(basis, rng, statistics, lr):
    # amplitudes recomputed in the embedded first-quantized space
    projector = nl.slocc_projector(basis, statistics, lr)
    for _ in range(5):
        l, r, lp, rp = random_amplitudes(rng)
        state = deformed_pair(basis, statistics, l, r, lp, rp)
        amps = np.array([nl.inner_product(ket, state) for _, ket in projector.kets])
        oracle = np.array(
            [reference.inner_product_by_symmetrization(ket, state) for _, ket in projector.kets]
        )
        assert np.max(np.abs(amps - oracle)) <= 1e-9


def test_no_coincidence_raises(basis, lr):
    # both constituents parked on L: never one per region
    state = nl.NState.product("bosons", (basis.ket("L", spin="up"), basis.ket("L", spin="down")))
    with pytest.raises(nl.NoCoincidenceError):
        nl.slocc_postselect_pure(state, lr)


def test_output_invariant_under_input_scaling(basis, lr):
    state = deformed_pair(basis, "fermions", 0.6, 0.8, 0.8, 0.6)
    labeled_a, p_a = nl.slocc_postselect_pure(state, lr)
    labeled_b, p_b = nl.slocc_postselect_pure(state * 7.3, lr)
    assert p_a == pytest.approx(p_b, abs=1e-9)
    assert np.max(np.abs(labeled_a.amplitudes - labeled_b.amplitudes)) <= 1e-9


def test_probability_within_unit_interval(basis, rng, lr):
    for statistics in BOTH:
        for _ in range(10):
            l, r, lp, rp = random_amplitudes(rng)
            state = nl.normalize(deformed_pair(basis, statistics, l, r, lp, rp))
            _, probability = nl.slocc_postselect_pure(state, lr)
            assert -1e-9 <= probability <= 1 + 1e-9


def test_unoverlapped_output_is_product(basis, lr):
    labeled, _ = nl.slocc_postselect_pure(deformed_pair(basis, "fermions", 1, 0, 0, 1), lr)
    assert nl.concurrence(labeled.density_matrix()) == pytest.approx(0, abs=1e-9)


# ---------------------------------------------------------------------------
# mixed postselection
# ---------------------------------------------------------------------------


def test_mixed_agrees_with_pure_on_pure_input(basis, lr):
    state = nl.normalize(deformed_pair(basis, "fermions", 0.6, 0.8, SQ2, SQ2))
    labeled, p_pure = nl.slocc_postselect_pure(state, lr)
    dm, p_mixed = nl.slocc_postselect_mixed(nl.Ensemble.pure(state), lr)
    assert p_pure == pytest.approx(p_mixed, abs=1e-9)
    assert np.max(np.abs(dm.matrix - labeled.density_matrix().matrix)) <= 1e-9


def test_dephased_singlet_restores_under_maximal_overlap(basis, lr):
    # the two dephasing branches deform, project, and renormalize onto the
    # same singlet output (up to a global sign), so the mixture is rank one
    spec = nl.two_mode_overlap(basis, SQ2, SQ2, SQ2, SQ2)
    branches = (
        nl.build_preset("bell_singlet", "fermions", basis=basis),
        nl.build_preset("bell_triplet", "fermions", basis=basis),
    )
    mixture = nl.deform_ensemble(spec, nl.Ensemble(((0.6, branches[0]), (0.4, branches[1]))))
    dm, probability = nl.slocc_postselect_mixed(mixture, lr)
    eigs = np.linalg.eigvalsh(dm.matrix)
    assert eigs[-1] == pytest.approx(1, abs=1e-9)  # rank one
    up, down = basis.internal_configs[0], basis.internal_configs[1]
    singlet = np.zeros(4, dtype=complex)
    singlet[1] = SQ2
    singlet[2] = -SQ2
    assert nl.fidelity(dm, singlet) == pytest.approx(1, abs=1e-9)
    assert probability > 0


def test_parallel_spin_mixture_projects_diagonally(basis, lr):
    # members |psi1 up, psi2 up> and |psi1 down, psi2 down>: each projects on
    # one diagonal labeled configuration with weight |l r' + eta l' r|^2
    l, r, lp, rp = 0.8, 0.6, 0.6, 0.8
    spec = nl.two_mode_overlap(basis, l, r, lp, rp)
    up_up = nl.deform(spec, nl.build_preset("product_AB", "fermions", basis=basis, spins=("up", "up")))
    down_down = nl.deform(spec, nl.build_preset("product_AB", "fermions", basis=basis, spins=("down", "down")))
    member_norm = 1 - (l * lp + r * rp) ** 2  # Pauli suppression of the overlap
    mixture = nl.Ensemble(
        ((0.5, nl.normalize(up_up)), (0.5, nl.normalize(down_down)))
    )
    dm, probability = nl.slocc_postselect_mixed(mixture, lr)
    coincidence = (l * rp - lp * r) ** 2  # eta = -1
    assert probability == pytest.approx(coincidence / member_norm, abs=1e-9)
    off_diagonal = dm.matrix - np.diag(np.diag(dm.matrix))
    assert np.max(np.abs(off_diagonal)) <= 1e-12
    assert dm.matrix[0, 0] == pytest.approx(0.5, abs=1e-9)
    assert dm.matrix[3, 3] == pytest.approx(0.5, abs=1e-9)


def test_mixed_with_no_coincidence_raises(basis, lr):
    state = nl.NState.product("bosons", (basis.ket("L", spin="up"), basis.ket("L", spin="down")))
    with pytest.raises(nl.NoCoincidenceError):
        nl.slocc_postselect_mixed(nl.Ensemble.pure(state), lr)


# ---------------------------------------------------------------------------
# exchange phase
# ---------------------------------------------------------------------------


def test_boson_phase_is_zero(basis, lr):
    labeled, _ = nl.slocc_postselect_pure(deformed_pair(basis, "bosons", SQ2, SQ2, SQ2, SQ2), lr)
    assert nl.extract_exchange_phase(labeled, SQ2, SQ2, SQ2, SQ2) == pytest.approx(0, abs=1e-9)


def test_fermion_phase_is_pi(basis, lr):
    labeled, _ = nl.slocc_postselect_pure(deformed_pair(basis, "fermions", SQ2, SQ2, SQ2, SQ2), lr)
    assert nl.extract_exchange_phase(labeled, SQ2, SQ2, SQ2, SQ2) == pytest.approx(np.pi, abs=1e-9)


def test_fermion_phase_is_parameter_independent(basis, rng, lr):
    for _ in range(20):
        l, r, lp, rp = random_amplitudes(rng)
        labeled, _ = nl.slocc_postselect_pure(deformed_pair(basis, "fermions", l, r, lp, rp), lr)
        theta = nl.extract_exchange_phase(labeled, l, r, lp, rp)
        assert theta == pytest.approx(np.pi, abs=1e-9)


def test_phase_undefined_for_vanishing_amplitudes(basis, lr):
    labeled, _ = nl.slocc_postselect_pure(deformed_pair(basis, "fermions", 1, 0, 0, 1), lr)
    with pytest.raises(nl.PhaseUndefinedError):
        nl.extract_exchange_phase(labeled, 1, 0, 0, 1)


# ---------------------------------------------------------------------------
# labeled embedding round trip
# ---------------------------------------------------------------------------


def test_localized_embedding_round_trip(basis):
    ab = SloccRegions.of(("A",), ("B",))
    state = nl.build_preset("bell_singlet", "fermions", basis=basis)
    labeled = nl.localized_labeled_state(state, ab)
    back = nl.labeled_to_ensemble(labeled.density_matrix(), "fermions")
    assert len(back.members) == 1
    weight, member = back.members[0]
    assert weight == pytest.approx(1, abs=1e-9)
    assert abs(abs(nl.inner_product(member, state)) - 1) <= 1e-9


def test_embedding_rejects_overlapped_constituents(basis):
    ab = SloccRegions.of(("A",), ("B",))
    psi1 = (basis.ket("A", spin="up") + basis.ket("B", spin="up")) * SQ2
    psi2 = (basis.ket("A", spin="up") - basis.ket("B", spin="up")) * SQ2
    state = nl.NState.product("fermions", (psi1, psi2))
    with pytest.raises(nl.StructureError):
        nl.localized_labeled_state(state, ab)
