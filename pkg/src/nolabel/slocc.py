"""Coincidence postselection onto disjoint regions and the labeled output.

Spatially localized operations plus a coincidence measurement turn an
unlabeled N-particle state into an ordinary tensor-product state with one
factor per detection region: the projector runs over all internal
configurations with exactly one particle per region,

    Pi = sum_{s_1..s_N} |S_1 s_1, .., S_N s_N><S_1 s_1, .., S_N s_N|

where |S_k s> is the region's normalized mode vector carrying internal
configuration s (a single-mode region's vector is the mode itself; a
multi-mode region uses the uniform superposition of its modes).  Output
amplitudes are computed directly as unlabeled inner products, so no
exponential symmetrized space is ever materialized; events that bunch
several particles into one region are discarded, and their weight is
exactly 1 - P for the reported postselection probability P.

Labeled tensor factors follow the region declaration order; within each
factor, the basis follows the mode basis' internal configuration order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    NoCoincidenceError,
    PhaseUndefinedError,
    StructureError,
)
from .kernels import inner_product, norm_squared
from .states import (
    EQ_TOL,
    ZERO_TOL,
    Ensemble,
    ModeBasis,
    NState,
    ProductKet,
    Region,
    SingleParticleState,
    Statistics,
)


@dataclass(frozen=True)
class SloccRegions:
    """Ordered, pairwise disjoint detection regions; the order fixes the
    labeled tensor-factor order."""

    regions: tuple[Region, ...]

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        if not self.regions:
            raise StructureError("need at least one detection region")
        for i, a in enumerate(self.regions):
            for b in self.regions[i + 1:]:
                if a.modes & b.modes:
                    raise StructureError(f"detection regions must be disjoint; {a} overlaps {b}")

    @classmethod
    def of(cls, *mode_groups) -> "SloccRegions":
        return cls(tuple(Region.of(*g) if not isinstance(g, Region) else g for g in mode_groups))

    @property
    def n(self) -> int:
        return len(self.regions)


def region_mode_state(basis: ModeBasis, region: Region, config: tuple[int, ...]) -> SingleParticleState:
    """|S, config>: normalized uniform mode vector over the region's modes."""
    region.validate(basis)
    amplitudes = np.zeros(basis.dim, dtype=complex)
    weight = 1.0 / np.sqrt(len(region.modes))
    ci = basis.config_index(config)
    for mode in region.modes:
        amplitudes[basis.mode_index(mode) * basis.n_internal + ci] = weight
    return SingleParticleState(basis, amplitudes)


@dataclass(frozen=True)
class SloccProjector:
    """The coincidence projector, expanded as (configs, unlabeled ket) pairs."""

    basis: ModeBasis
    statistics: Statistics
    regions: SloccRegions
    kets: tuple[tuple[tuple[tuple[int, ...], ...], NState], ...]

    @property
    def rank(self) -> int:
        return len(self.kets)


def slocc_projector(basis: ModeBasis, statistics, regions: SloccRegions) -> SloccProjector:
    """Build the coincidence projector over the given disjoint regions."""
    stats = Statistics.coerce(statistics)
    single = {}
    for region in regions.regions:
        for cfg in basis.internal_configs:
            single[(region, cfg)] = region_mode_state(basis, region, cfg)
    kets = []
    for combo in itertools.product(basis.internal_configs, repeat=regions.n):
        factors = tuple(single[(region, cfg)] for region, cfg in zip(regions.regions, combo))
        kets.append((combo, NState(stats, (ProductKet(1.0, factors),))))
    return SloccProjector(basis, stats, regions, tuple(kets))


@dataclass(frozen=True)
class LabeledState:
    """Normalized pure state in the labeled per-region tensor space.

    ``amplitudes`` is flat over internal-configuration tuples, first region
    most significant.
    """

    basis: ModeBasis
    regions: SloccRegions
    amplitudes: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.amplitudes, dtype=complex).copy()
        expected = self.basis.n_internal ** self.regions.n
        if arr.shape != (expected,):
            raise StructureError(f"labeled amplitudes must have shape ({expected},), got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @property
    def configs(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        return tuple(itertools.product(self.basis.internal_configs, repeat=self.regions.n))

    def amplitude(self, combo) -> complex:
        return complex(self.amplitudes[self.configs.index(tuple(tuple(c) for c in combo))])

    def density_matrix(self) -> "LabeledDensityMatrix":
        return LabeledDensityMatrix(self.basis, self.regions, np.outer(self.amplitudes, np.conj(self.amplitudes)))

    def config_labels(self) -> tuple[str, ...]:
        return tuple(
            ";".join(self.basis.config_label(c) for c in combo) for combo in self.configs
        )


@dataclass(frozen=True)
class LabeledDensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite labeled density matrix."""

    basis: ModeBasis
    regions: SloccRegions
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex).copy()
        d = self.basis.n_internal ** self.regions.n
        if m.shape != (d, d):
            raise StructureError(f"labeled density matrix must be {d}x{d}, got {m.shape}")
        if np.max(np.abs(m - np.conj(m.T))) > EQ_TOL:
            raise StructureError("labeled density matrix must be Hermitian")
        if abs(np.trace(m).real - 1.0) > EQ_TOL or abs(np.trace(m).imag) > EQ_TOL:
            raise StructureError(f"labeled density matrix must have unit trace, got {np.trace(m):.12g}")
        if np.min(np.linalg.eigvalsh((m + np.conj(m.T)) / 2.0)) < -EQ_TOL:
            raise StructureError("labeled density matrix must be positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def _coincidence_amplitudes(state: NState, regions: SloccRegions) -> np.ndarray:
    projector = slocc_projector(state.basis, state.statistics, regions)
    return np.array([inner_product(ket, state) for _, ket in projector.kets])


def slocc_postselect_pure(state: NState, regions: SloccRegions) -> tuple[LabeledState, float]:
    """Project a pure state on the coincidence subspace and renormalize.

    Returns the labeled output state and the postselection probability
    (coincidence weight over the state's squared norm).
    """
    if state.is_zero:
        raise NoCoincidenceError("zero state has no coincidence outcome")
    if state.n != regions.n:
        raise StructureError(f"{regions.n} regions but {state.n} particles")
    amps = _coincidence_amplitudes(state, regions)
    raw = float(np.sum(np.abs(amps) ** 2))
    denom = norm_squared(state)
    if denom <= ZERO_TOL:
        raise NoCoincidenceError("input state has vanishing norm")
    probability = raw / denom
    if probability <= ZERO_TOL:
        raise NoCoincidenceError("postselection probability vanishes")
    labeled = LabeledState(state.basis, regions, amps / np.sqrt(raw))
    return labeled, probability


def slocc_postselect_mixed(rho: Ensemble, regions: SloccRegions) -> tuple[LabeledDensityMatrix, float]:
    """Member-wise coincidence projection of a mixture.

    Returns the conditioned labeled density matrix and the total
    postselection probability.
    """
    basis = rho.basis
    if basis is None:
        raise NoCoincidenceError("ensemble carries no nonzero member")
    d = basis.n_internal ** regions.n
    accumulated = np.zeros((d, d), dtype=complex)
    probability = 0.0
    for weight, member in rho.members:
        if weight <= ZERO_TOL or member.is_zero:
            continue
        if member.n != regions.n:
            raise StructureError(f"{regions.n} regions but {member.n} particles")
        denom = norm_squared(member)
        if denom <= ZERO_TOL:
            continue
        amps = _coincidence_amplitudes(member, regions)
        accumulated += weight * np.outer(amps, np.conj(amps)) / denom
        probability += weight * float(np.sum(np.abs(amps) ** 2)) / denom
    if probability <= ZERO_TOL:
        raise NoCoincidenceError("postselection probability vanishes for every member")
    return LabeledDensityMatrix(basis, regions, accumulated / probability), probability


def extract_exchange_phase(
    output: LabeledState, l: complex, r: complex, l_prime: complex, r_prime: complex
) -> float:
    """Exchange phase encoded in a two-region, two-level labeled output.

    With constituents prepared as l|1st region> + r|2nd region> (unprimed)
    and l'|1st> + r'|2nd> (primed), the cross/direct amplitude ratio of the
    output equals the exchange factor, so

        theta = arg( amp(s2, s1) * l * r' / (amp(s1, s2) * l' * r) )

    in (-pi, pi], where s1, s2 are the first two internal configurations.
    Values within 1e-9 of -pi are reported as +pi so floating noise cannot
    flip the sign of a half-turn phase.
    """
    if output.regions.n != 2:
        raise StructureError("exchange-phase extraction needs exactly two regions")
    if output.basis.n_internal < 2:
        raise StructureError("exchange-phase extraction needs at least two internal configurations")
    for name, value in (("l", l), ("r", r), ("l_prime", l_prime), ("r_prime", r_prime)):
        if abs(complex(value)) <= ZERO_TOL:
            raise PhaseUndefinedError(f"deformation amplitude {name} vanishes")
    c0, c1 = output.basis.internal_configs[0], output.basis.internal_configs[1]
    direct = output.amplitude((c0, c1))
    crossed = output.amplitude((c1, c0))
    if abs(direct) <= ZERO_TOL or abs(crossed) <= ZERO_TOL:
        raise PhaseUndefinedError("both output amplitudes must be nonzero to extract a phase")
    theta = float(np.angle((crossed * complex(l) * complex(r_prime)) / (direct * complex(l_prime) * complex(r))))
    if theta <= -np.pi + EQ_TOL:
        theta += 2.0 * np.pi
    return theta


# ---------------------------------------------------------------------------
# Isomorphism between localized unlabeled states and labeled objects,
# used to apply particle-local maps in the distinguishable regime.
# ---------------------------------------------------------------------------


def localized_labeled_state(state: NState, regions: SloccRegions) -> LabeledState:
    """Labeled image of a state fully localized on the regions, one particle
    per region.

    Requires every factor of every term to lie (within tolerance) inside a
    single region, one factor per region, and the coincidence projection to
    be lossless; otherwise raises :class:`StructureError`.
    """
    if state.is_zero:
        raise StructureError("cannot embed the zero state")
    if state.n != regions.n:
        raise StructureError(f"{regions.n} regions but {state.n} particles")
    basis = state.basis
    masks = [basis.region_mask(r.modes) for r in regions.regions]
    for term in state.terms:
        taken = set()
        for factor in term.factors:
            total = np.sum(np.abs(factor.amplitudes) ** 2)
            homes = [
                i
                for i, mask in enumerate(masks)
                if np.sum(np.abs(factor.amplitudes[mask]) ** 2) >= (1.0 - EQ_TOL) * total
            ]
            if len(homes) != 1 or homes[0] in taken:
                raise StructureError(
                    "constituents are not localized one-per-region; particle-local maps are undefined"
                )
            taken.add(homes[0])
    amps = _coincidence_amplitudes(state, regions)
    raw = float(np.sum(np.abs(amps) ** 2))
    denom = norm_squared(state)
    if denom <= ZERO_TOL:
        raise StructureError("state has vanishing norm")
    if abs(raw / denom - 1.0) > EQ_TOL:
        raise StructureError(
            "the labeled embedding is lossy for this state; region profiles do not match"
        )
    return LabeledState(basis, regions, amps / np.sqrt(raw))


def labeled_to_ensemble(dm: LabeledDensityMatrix, statistics) -> Ensemble:
    """Unlabeled mixture equivalent to a labeled density matrix.

    Each eigenvector becomes an NState over the regions' mode vectors,
    weighted by its eigenvalue.
    """
    stats = Statistics.coerce(statistics)
    basis, regions = dm.basis, dm.regions
    hermitian = (dm.matrix + np.conj(dm.matrix.T)) / 2.0
    eigvals, eigvecs = np.linalg.eigh(hermitian)
    combos = tuple(itertools.product(basis.internal_configs, repeat=regions.n))
    single = {
        (region, cfg): region_mode_state(basis, region, cfg)
        for region in regions.regions
        for cfg in basis.internal_configs
    }
    members = []
    for value, vector in zip(eigvals, eigvecs.T):
        if value <= ZERO_TOL:
            continue
        terms = []
        for amp, combo in zip(vector, combos):
            if abs(amp) <= ZERO_TOL:
                continue
            factors = tuple(single[(region, cfg)] for region, cfg in zip(regions.regions, combo))
            terms.append(ProductKet(complex(amp), factors))
        members.append((float(value), NState(stats, tuple(terms)).canonical()))
    total = sum(w for w, _ in members)
    return Ensemble(tuple((w / total, s) for w, s in members))
