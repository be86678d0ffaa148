"""Acceptance suite: the binding end-to-end criteria, one test each.

Every test prints one `[criterion NN] PASS/FAIL` line (run with `pytest -s`
to see them on success) and enforces its stated tolerance.
"""

import functools
import time

import numpy as np
import pytest

import nolabel as nl
from nolabel import reference
from nolabel import scenario as sc
from nolabel import DetectionSetup, Region, SloccRegions

SQ2 = 1 / np.sqrt(2)
BOTH = (nl.Statistics.BOSONS, nl.Statistics.FERMIONS)


def criterion(number, description):
    def wrap(fn):
        @functools.wraps(fn)
        def runner(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[criterion {number:02d}] FAIL  {description}")
                raise
            print(f"[criterion {number:02d}] PASS  {description}")

        return runner

    return wrap


def random_parameters(rng):
    """Four nonzero complex amplitudes with |l|^2+|r|^2 = |l'|^2+|r'|^2 = 1."""
    l = rng.uniform(0.05, 0.95) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    lp = rng.uniform(0.05, 0.95) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    r = np.sqrt(1 - abs(l) ** 2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    rp = np.sqrt(1 - abs(lp) ** 2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    return l, r, lp, rp


def postselect(basis, statistics, l, r, lp, rp):
    state = nl.build_preset("product_AB", statistics, basis=basis)
    deformed = nl.deform(nl.two_mode_overlap(basis, l, r, lp, rp), state)
    return nl.slocc_postselect_pure(deformed, SloccRegions.of(("L",), ("R",)))


@pytest.fixture(scope="module")
def protocol_basis():
    return nl.default_protocol_basis()


@pytest.fixture(scope="module")
def slocc_samples(protocol_basis):
    """500 random parameter sets postselected under both statistics."""
    rng = np.random.default_rng(20240501)
    samples = []
    for _ in range(500):
        l, r, lp, rp = random_parameters(rng)
        per_statistics = {}
        for statistics in BOTH:
            per_statistics[statistics] = postselect(protocol_basis, statistics, l, r, lp, rp)
        samples.append(((l, r, lp, rp), per_statistics))
    return samples


@criterion(1, "two-particle norm identity on 200 seeded random kets (1e-9, < 1 s)")
def test_criterion_1_norm_identity(protocol_basis):
    rng = np.random.default_rng(101)
    started = time.perf_counter()
    for index in range(200):
        statistics = BOTH[index % 2]
        vectors = rng.normal(size=(2, protocol_basis.dim)) + 1j * rng.normal(size=(2, protocol_basis.dim))
        psi1 = nl.SingleParticleState(protocol_basis, vectors[0] / np.linalg.norm(vectors[0]))
        psi2 = nl.SingleParticleState(protocol_basis, vectors[1] / np.linalg.norm(vectors[1]))
        state = nl.NState.product(statistics, (psi1, psi2))
        expected = 1 + statistics.eta * abs(nl.overlap(psi1, psi2)) ** 2
        assert abs(nl.inner_product(state, state) - expected) <= 1e-9
    assert time.perf_counter() - started < 1.0


@criterion(2, "permanent/determinant match enumeration for N <= 6 (1e-9); N=20 permanent <= 5 s")
def test_criterion_2_kernels():
    rng = np.random.default_rng(202)
    for n in range(1, 7):
        for _ in range(4):
            m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            perm_slow = reference.permanent_by_enumeration(m)
            det_slow = reference.determinant_by_enumeration(m)
            assert abs(nl.permanent(m) - perm_slow) <= 1e-9 * max(1.0, abs(perm_slow))
            assert abs(nl.determinant(m) - det_slow) <= 1e-9 * max(1.0, abs(det_slow))
    big = rng.normal(size=(20, 20)) + 1j * rng.normal(size=(20, 20))
    started = time.perf_counter()
    value = nl.permanent(big)
    elapsed = time.perf_counter() - started
    assert np.isfinite(value.real) and np.isfinite(value.imag)
    assert elapsed <= 5.0


@criterion(3, "inner products match the first-quantized symmetrization oracle (N <= 4, dim <= 4, 1e-9)")
def test_criterion_3_oracle_equivalence():
    rng = np.random.default_rng(303)
    basis = nl.ModeBasis(("m1", "m2"), (("s", ("0", "1")),))  # single-particle dimension 4

    def random_state(n, terms=2):
        out = None
        for _ in range(terms):
            factors = []
            for _ in range(n):
                v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
                factors.append(nl.SingleParticleState(basis, v / np.linalg.norm(v)))
            term = nl.NState.product(statistics, factors) * complex(rng.normal(), rng.normal())
            out = term if out is None else out + term
        return out

    # pin the proportionality constant on the two-particle case: the
    # permutation-sum amplitude is exactly 2! times the embedded one
    for statistics in BOTH:
        for _ in range(20):
            bra, ket = random_state(2, terms=1), random_state(2, terms=1)
            direct = nl.inner_product(bra, ket)
            embedded = np.vdot(reference.symmetrized_vector(bra), reference.symmetrized_vector(ket))
            assert abs(direct - 2 * embedded) <= 1e-9 * max(1.0, abs(direct))

    for statistics in BOTH:
        for n in (2, 3, 4):
            for _ in range(5):
                bra, ket = random_state(n), random_state(n)
                direct = nl.inner_product(bra, ket)
                oracle = reference.inner_product_by_symmetrization(bra, ket)
                assert abs(direct - oracle) <= 1e-9 * max(1.0, abs(oracle))


@criterion(4, "postselected state and probability match the closed form on 500 samples (1e-9)")
def test_criterion_4_slocc_closed_form(protocol_basis, slocc_samples):
    n_internal = protocol_basis.n_internal
    for (l, r, lp, rp), outputs in slocc_samples:
        z = abs(l * rp) ** 2 + abs(lp * r) ** 2
        for statistics in BOTH:
            labeled, probability = outputs[statistics]
            assert abs(probability - z) <= 1e-9
            expected = np.zeros(n_internal**2, dtype=complex)
            expected[1] = l * rp / np.sqrt(z)                      # |L up, R down>
            expected[n_internal] = statistics.eta * lp * r / np.sqrt(z)  # |L down, R up>
            assert np.max(np.abs(labeled.amplitudes - expected)) <= 1e-9


@criterion(5, "indistinguishability endpoints: 0, 1, and log2(6) for the uniform triple (1e-9)")
def test_criterion_5_indistinguishability_endpoints(protocol_basis):
    setup = DetectionSetup.spatial(Region.of("L"), Region.of("R"))

    def factors(l, r, lp, rp):
        psi1 = protocol_basis.ket("L", spin="up") * l + protocol_basis.ket("R", spin="up") * r
        psi2 = protocol_basis.ket("L", spin="down") * lp + protocol_basis.ket("R", spin="down") * rp
        return [psi1, psi2]

    assert nl.degree_of_indistinguishability(setup, factors(1, 0, 0, 1)) <= 1e-9
    maximal = nl.degree_of_indistinguishability(setup, factors(SQ2, SQ2, SQ2, SQ2))
    assert abs(maximal - 1) <= 1e-9

    triple = nl.ModeBasis(("S1", "S2", "S3"), (("spin", ("up", "down")),))
    uniform = (
        triple.ket("S1", spin="up") + triple.ket("S2", spin="up") + triple.ket("S3", spin="up")
    ) * (1 / np.sqrt(3))
    setup3 = DetectionSetup.spatial(Region.of("S1"), Region.of("S2"), Region.of("S3"))
    value = nl.degree_of_indistinguishability(setup3, [uniform] * 3)
    assert abs(value - np.log2(6)) <= 1e-9


@criterion(6, "concurrence matches 2|l l' r r'|/Z on 500 samples (1e-9); exactly 1 at maximal overlap")
def test_criterion_6_entanglement_activation(protocol_basis, slocc_samples):
    for (l, r, lp, rp), outputs in slocc_samples:
        z = abs(l * rp) ** 2 + abs(lp * r) ** 2
        expected = 2 * abs(l * lp * r * rp) / z
        for statistics in BOTH:
            labeled, _ = outputs[statistics]
            assert abs(nl.concurrence(labeled.density_matrix()) - expected) <= 1e-9
    for statistics in BOTH:
        labeled, _ = postselect(protocol_basis, statistics, SQ2, SQ2, SQ2, SQ2)
        assert abs(nl.concurrence(labeled.density_matrix()) - 1) <= 1e-9


@criterion(7, "phase-damped singlet restores to EoF = fidelity = 1 (1e-6); no overlap decays strictly")
def test_criterion_7_entanglement_restoration():
    grid = [round(0.1 * k, 1) for k in range(1, 10)]
    for q in grid:
        config = sc.parse_scenario(
            {
                "statistics": "fermions",
                "initial_state": {"preset": "bell_singlet"},
                "noise": {"channel": "phase_damping", "strength": q},
                "deformation": {"l": SQ2, "r": SQ2, "l_prime": SQ2, "r_prime": SQ2},
                "outputs": {"fidelity_target": "bell_singlet"},
            }
        )
        record = sc.run_pipeline(config)
        assert abs(record.entanglement_of_formation - 1) <= 1e-6
        assert abs(record.fidelity - 1) <= 1e-6

    unrestored = []
    for q in grid:
        config = sc.parse_scenario(
            {
                "statistics": "fermions",
                "initial_state": {"preset": "bell_singlet"},
                "noise": {"channel": "phase_damping", "strength": q},
                "deformation": {"l": 1.0, "r": 0.0, "l_prime": 0.0, "r_prime": 1.0},
            }
        )
        unrestored.append(sc.run_pipeline(config).entanglement_of_formation)
    for previous, current in zip(unrestored, unrestored[1:]):
        assert current < previous


@criterion(8, "exchange phase is 0 (bosons) / pi (fermions) on 100 random parameter sets (1e-9)")
def test_criterion_8_exchange_phase(protocol_basis):
    rng = np.random.default_rng(808)
    for _ in range(100):
        l, r, lp, rp = random_parameters(rng)
        labeled_b, _ = postselect(protocol_basis, nl.Statistics.BOSONS, l, r, lp, rp)
        labeled_f, _ = postselect(protocol_basis, nl.Statistics.FERMIONS, l, r, lp, rp)
        assert abs(nl.extract_exchange_phase(labeled_b, l, r, lp, rp)) <= 1e-9
        assert abs(nl.extract_exchange_phase(labeled_f, l, r, lp, rp) - np.pi) <= 1e-9


@criterion(9, "deformation unitarity dichotomy: disjoint specs preserve norms (1e-9), merging specs do not (> 1e-3)")
def test_criterion_9_unitarity_dichotomy():
    basis = nl.ModeBasis(("x1", "x2a", "x2b", "x3", "x4"), (("spin", ("up", "down")),))
    rng = np.random.default_rng(909)

    def uniform_x2():
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        a /= np.linalg.norm(a)
        up = (basis.ket("x2a", spin="up") + basis.ket("x2b", spin="up")) * SQ2
        down = (basis.ket("x2a", spin="down") + basis.ket("x2b", spin="down")) * SQ2
        return up * a[0] + down * a[1]

    def localized(mode):
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        a /= np.linalg.norm(a)
        return basis.ket(mode, spin="up") * a[0] + basis.ket(mode, spin="down") * a[1]

    probes = [
        nl.NState.product(nl.Statistics.FERMIONS, (localized("x1"), uniform_x2(), localized("x3")))
        for _ in range(100)
    ]
    rotate = nl.spin_rotation(basis, 0.7)
    translate = nl.spatial_unitary(basis, {"x3": {"x4": 1.0}, "x4": {"x3": 1.0}})
    restrict = nl.spatial_unitary(basis, {"x2a": {"x2a": SQ2, "x2b": SQ2}}).dagger()
    merge = nl.spatial_unitary(basis, {"x4": {"x2a": SQ2, "x2b": SQ2}}).dagger()

    region_x2 = Region.of("x2a", "x2b")
    disjoint = nl.DeformationSpec(
        ((rotate, Region.of("x1")), (restrict, region_x2), (translate, Region.of("x3")))
    )
    merging = nl.DeformationSpec(
        ((rotate, Region.of("x1")), (merge, region_x2), (translate, Region.of("x3")))
    )
    assert nl.check_unitarity(disjoint, probes).max_deviation <= 1e-9
    assert nl.check_unitarity(merging, probes).max_deviation > 1e-3


@criterion(10, "21-point overlap sweep: EoF nondecreasing in I with endpoints (0, 0) and (1, 1)")
def test_criterion_10_monotone_sweep():
    config = sc.parse_scenario(
        {
            "statistics": "fermions",
            "initial_state": {"preset": "product_AB"},
            "deformation": {"l": SQ2, "r": SQ2, "l_prime": 0.0, "r_prime": 1.0},
            "sweep": {"parameter": "l_prime", "start": 0.0, "stop": SQ2, "steps": 21},
        }
    )
    records = sc.run_sweep(config)
    assert len(records) == 21
    assert abs(records[0].indistinguishability) <= 1e-9
    assert abs(records[0].entanglement_of_formation) <= 1e-9
    assert abs(records[-1].indistinguishability - 1) <= 1e-9
    assert abs(records[-1].entanglement_of_formation - 1) <= 1e-9
    ordered = sorted(records, key=lambda r: r.indistinguishability)
    for previous, current in zip(ordered, ordered[1:]):
        assert current.entanglement_of_formation >= previous.entanglement_of_formation - 1e-9
