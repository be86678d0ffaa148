"""Entropy-based degree of indistinguishability for N detected particles.

N single-particle detectors sit on pairwise disjoint spatial regions; each
detector resolves a (possibly empty) subset of the internal degrees of
freedom.  For a product ket's factor list, the probability that detector k
fires on constituent j is the squared norm of constituent j projected onto
detector k's region and accessible outcome.  The joint probability of a
one-particle-per-detector coincidence under an assignment is the product of
its single-detector probabilities, and the degree of indistinguishability
is the base-2 Shannon entropy of the joint probabilities over all distinct
assignments, normalized by their sum:

    I = - sum_alpha (p_alpha / Z) log2 (p_alpha / Z),   Z = sum_alpha p_alpha

I ranges from 0 (a single assignment explains the coincidence: perfectly
distinguishable with respect to this measurement) to log2(N!) (all
assignments equally likely: maximally indistinguishable).

The measure is defined on a single product ket's factor list; superposition
inputs are rejected because no prescription exists for them.  Events where
one region would hold several particles never enter the distinct-assignment
sum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import MeasureUndefinedError, StructureError
from .states import ZERO_TOL, ModeBasis, NState, ProductKet, Region, SingleParticleState

FactorsLike = Union[Sequence[SingleParticleState], ProductKet, NState]


@dataclass(frozen=True)
class DetectorSpec:
    """A detection region plus the internal outcome the detector resolves.

    ``accessible`` maps dof names to the detected level; dofs left out are
    invisible to the detector and get summed over.  An empty mapping makes
    the detector sensitive to position only.
    """

    region: Region
    accessible: tuple[tuple[str, Union[str, int]], ...] = ()

    def __post_init__(self):
        if isinstance(self.accessible, Mapping):
            items = tuple(sorted(self.accessible.items()))
        else:
            items = tuple(sorted((str(k), v) for k, v in self.accessible))
        names = [k for k, _ in items]
        if len(set(names)) != len(names):
            raise StructureError("detector lists an internal dof twice")
        object.__setattr__(self, "accessible", items)


@dataclass(frozen=True)
class DetectionSetup:
    """N detectors on pairwise disjoint regions."""

    detectors: tuple[DetectorSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "detectors", tuple(self.detectors))
        if not self.detectors:
            raise StructureError("a detection setup needs at least one detector")
        for i, a in enumerate(self.detectors):
            for b in self.detectors[i + 1:]:
                if a.region.modes & b.region.modes:
                    raise StructureError(
                        f"detector regions must be pairwise disjoint; {a.region} overlaps {b.region}"
                    )

    @property
    def n(self) -> int:
        return len(self.detectors)

    @classmethod
    def spatial(cls, *regions: Region) -> "DetectionSetup":
        """Detectors sensitive to position only (empty accessible set)."""
        return cls(tuple(DetectorSpec(r) for r in regions))


def _detector_mask(basis: ModeBasis, detector: DetectorSpec) -> np.ndarray:
    mask = basis.region_mask(detector.region.modes)
    if detector.accessible:
        dof_names = [name for name, _ in basis.internal]
        wanted: dict[int, int] = {}
        for name, level in detector.accessible:
            if name not in dof_names:
                raise StructureError(f"basis has no internal dof {name!r}")
            d = dof_names.index(name)
            levels = basis.internal[d][1]
            idx = levels.index(level) if isinstance(level, str) else int(level)
            if not 0 <= idx < len(levels):
                raise StructureError(f"dof {name!r} has no level {level!r}")
            wanted[d] = idx
        config_ok = np.array(
            [all(cfg[d] == idx for d, idx in wanted.items()) for cfg in basis.internal_configs]
        )
        mask &= np.tile(config_ok, basis.n_spatial)
    return mask


def detection_prob(detector: DetectorSpec, psi: SingleParticleState) -> float:
    """Probability that the detector fires on a particle in state psi."""
    detector.region.validate(psi.basis)
    mask = _detector_mask(psi.basis, detector)
    return float(np.sum(np.abs(psi.amplitudes[mask]) ** 2))


def _coerce_factors(factors: FactorsLike) -> tuple[SingleParticleState, ...]:
    if isinstance(factors, NState):
        if len(factors.terms) != 1:
            raise StructureError(
                "the measure is defined on a single product ket; superpositions are rejected"
            )
        return factors.terms[0].factors
    if isinstance(factors, ProductKet):
        return factors.factors
    return tuple(factors)


def detection_matrix(setup: DetectionSetup, factors: FactorsLike) -> np.ndarray:
    """P[k, j]: probability of detector k firing on constituent j."""
    fs = _coerce_factors(factors)
    return np.array([[detection_prob(det, f) for f in fs] for det in setup.detectors])


def joint_prob(
    setup: DetectionSetup, factors: FactorsLike, assignment: Sequence[int]
) -> float:
    """Coincidence probability of detector k firing on factor assignment[k]."""
    fs = _coerce_factors(factors)
    if sorted(assignment) != list(range(len(fs))):
        raise StructureError(f"assignment {tuple(assignment)} is not a permutation of 0..{len(fs) - 1}")
    if len(fs) != setup.n:
        raise StructureError(f"{setup.n} detectors but {len(fs)} constituents")
    p = 1.0
    for det, j in zip(setup.detectors, assignment):
        p *= detection_prob(det, fs[j])
    return p


def _joint_probabilities(setup: DetectionSetup, factors: FactorsLike) -> list[float]:
    probs = detection_matrix(setup, factors)
    n = probs.shape[1]
    if probs.shape[0] != n:
        raise StructureError(f"{probs.shape[0]} detectors but {n} constituents")
    out = []
    for perm in itertools.permutations(range(n)):
        out.append(float(np.prod(probs[np.arange(n), perm])))
    return out


def partition_function(setup: DetectionSetup, factors: FactorsLike) -> float:
    """Sum of the joint probabilities over all distinct assignments.

    Structurally this equals the permanent of the detection-probability
    matrix; it is computed here as the explicit assignment sum so the
    permanent identity stays an independent cross-check.
    """
    return sum(_joint_probabilities(setup, factors))


def degree_of_indistinguishability(setup: DetectionSetup, factors: FactorsLike) -> float:
    """Base-2 entropy of the normalized joint coincidence probabilities.

    Zero-probability assignments are excluded (0 log 0 := 0).  Raises
    :class:`MeasureUndefinedError` when no coincidence is possible at all.
    """
    probs = _joint_probabilities(setup, factors)
    z = sum(probs)
    if z <= ZERO_TOL:
        raise MeasureUndefinedError("no assignment has nonzero coincidence probability")
    entropy = 0.0
    for p in probs:
        if p > 0.0:
            q = p / z
            entropy -= q * np.log2(q)
    return max(entropy, 0.0)
