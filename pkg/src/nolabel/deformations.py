"""Spatially localized operations and deformations of unlabeled states.

A *deformation* applies a different single-particle unitary to each
constituent, with each unitary tied to a spatial region of action.  On a
product ket the result is a weighted sum over all assignments of
constituents to (unitary, region) slots:

    D |psi_1,..,psi_N> = sum_alpha |<X_1|psi_alpha_1> ... <X_N|psi_alpha_N>|
        * eta^P(alpha) * |U_1 psi_alpha_1, ..., U_N psi_alpha_N>

and extends linearly over superpositions.  Two conventions are implemented
exactly as written and worth flagging:

* the assignment weight is the *modulus* of the product of region
  amplitudes, so any phases of <X|psi> are discarded;
* each unitary acts on the full assigned single-particle state, not on its
  restriction to the region, so factors straddling several regions are
  transformed whole.

The region amplitude |<X|psi>| of a (possibly multi-mode) region is the
Euclidean norm of psi's amplitudes on the region's modes, summed over
internal configurations; for a single mode and a factorized state this is
the familiar modulus of the spatial amplitude.

Assignments with zero weight are pruned before enumeration, so fully
localized inputs with a one-to-one factor/region match reduce to the plain
factor-wise unitary map without touching the remaining (N! - 1) terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import (
    BasisMismatchError,
    DegenerateStateError,
    DeformationUndefinedError,
    RegionSupportError,
    StructureError,
)
from .kernels import norm, norm_squared
from .states import (
    EQ_TOL,
    ZERO_TOL,
    Ensemble,
    ModeBasis,
    NState,
    ProductKet,
    Region,
    SingleParticleState,
    canonicalize,
    permutation_parity,
)


@dataclass(frozen=True)
class SingleParticleUnitary:
    """A unitary matrix over the full (mode x internal) single-particle basis."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StructureError(f"unitary must be square, got shape {m.shape}")
        deviation = np.max(np.abs(np.conj(m.T) @ m - np.eye(m.shape[0])))
        if deviation > EQ_TOL:
            raise StructureError(f"matrix is not unitary (deviation {deviation:.3e})")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, psi: SingleParticleState) -> SingleParticleState:
        if psi.basis.dim != self.dim:
            raise BasisMismatchError(f"unitary dimension {self.dim} does not match basis dimension {psi.basis.dim}")
        return SingleParticleState(psi.basis, self.matrix @ psi.amplitudes)

    def dagger(self) -> "SingleParticleUnitary":
        label = f"{self.label}^dag" if self.label else ""
        return SingleParticleUnitary(np.conj(self.matrix.T), label)


def identity_unitary(basis: ModeBasis) -> SingleParticleUnitary:
    return SingleParticleUnitary(np.eye(basis.dim), "identity")


def _complete_columns(dim: int, specified: dict[int, np.ndarray]) -> np.ndarray:
    """Complete orthonormal specified columns to a full unitary.

    Unspecified columns are filled, in index order, with canonical basis
    vectors orthogonalized against everything chosen so far (skipping any
    that fall inside the existing span).
    """
    chosen = list(specified.values())
    fill: list[np.ndarray] = []
    for m in range(dim):
        if len(chosen) + len(fill) >= dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[m] = 1.0
        for u in chosen + fill:
            v = v - np.vdot(u, v) * u
        nv = np.linalg.norm(v)
        if nv > 1e-7:
            fill.append(v / nv)
    if len(chosen) + len(fill) != dim:
        raise StructureError("could not complete the partial unitary")
    out = np.zeros((dim, dim), dtype=complex)
    it = iter(fill)
    for col in range(dim):
        out[:, col] = specified[col] if col in specified else next(it)
    return out


def spatial_unitary(
    basis: ModeBasis,
    columns: dict[str, dict[str, complex]],
    label: str = "",
) -> SingleParticleUnitary:
    """Unitary acting on the spatial part only (identity on internal dofs).

    ``columns[src][dst] = amplitude`` fixes the image of source mode
    ``src``; specified images must be orthonormal, and the remaining
    columns are completed deterministically.
    """
    n = basis.n_spatial
    specified: dict[int, np.ndarray] = {}
    for src, targets in columns.items():
        v = np.zeros(n, dtype=complex)
        for dst, amp in targets.items():
            v[basis.mode_index(dst)] = complex(amp)
        if abs(np.linalg.norm(v) - 1.0) > EQ_TOL:
            raise StructureError(f"image of mode {src!r} must be a unit vector")
        for prev_src, prev in specified.items():
            if abs(np.vdot(prev, v)) > EQ_TOL:
                raise StructureError("specified mode images must be mutually orthogonal")
        specified[basis.mode_index(src)] = v
    spatial = _complete_columns(n, specified)
    return SingleParticleUnitary(np.kron(spatial, np.eye(basis.n_internal)), label)


def internal_unitary(
    basis: ModeBasis, dof: str, matrix, label: str = ""
) -> SingleParticleUnitary:
    """Unitary acting on one internal dof across all spatial modes."""
    names = [name for name, _ in basis.internal]
    if dof not in names:
        raise BasisMismatchError(f"basis has no internal dof {dof!r}")
    m = np.asarray(matrix, dtype=complex)
    full = np.eye(1, dtype=complex)
    for name, levels in basis.internal:
        block = m if name == dof else np.eye(len(levels))
        full = np.kron(full, block)
    return SingleParticleUnitary(np.kron(np.eye(basis.n_spatial), full), label)


def spin_rotation(basis: ModeBasis, angle: float, dof: str = "spin") -> SingleParticleUnitary:
    """Real rotation by ``angle`` in a two-level internal dof."""
    c, s = np.cos(angle), np.sin(angle)
    return internal_unitary(basis, dof, np.array([[c, -s], [s, c]]), f"rot({angle:.4g})")


def region_weight(region: Region, psi: SingleParticleState) -> float:
    """|<X|psi>|: Euclidean norm of psi's amplitudes on the region's modes."""
    region.validate(psi.basis)
    mask = psi.basis.region_mask(region.modes)
    return float(np.linalg.norm(psi.amplitudes[mask]))


def localized_apply(
    operator: Union[SingleParticleUnitary, np.ndarray],
    region: Region,
    state: NState,
) -> NState:
    """Apply a single-particle operator localized on a region.

    Each constituent is transformed in turn, weighted by its probability
    amplitude of being found in the region; a region covering the whole
    spatial basis therefore reduces to the plain sum over constituents.
    Requires at least one constituent with support on the region.
    """
    matrix = operator.matrix if isinstance(operator, SingleParticleUnitary) else np.asarray(operator, dtype=complex)
    out_terms: list[ProductKet] = []
    any_support = False
    for term in state.terms:
        weights = [region_weight(region, f) for f in term.factors]
        for i, w in enumerate(weights):
            if w <= ZERO_TOL:
                continue
            any_support = True
            factors = list(term.factors)
            factors[i] = SingleParticleState(factors[i].basis, matrix @ factors[i].amplitudes)
            out_terms.append(ProductKet(term.coefficient * w, tuple(factors)))
    if not any_support:
        raise RegionSupportError(f"no constituent has support on {region}")
    return canonicalize(NState(state.statistics, tuple(out_terms)))


@dataclass(frozen=True)
class DeformationSpec:
    """Ordered (unitary, region) pairs, one per constituent."""

    pairs: tuple[tuple[SingleParticleUnitary, Region], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((u, r) for u, r in self.pairs))
        if not self.pairs:
            raise StructureError("a deformation needs at least one (unitary, region) pair")

    @property
    def n(self) -> int:
        return len(self.pairs)


def two_mode_overlap(
    basis: ModeBasis,
    l: complex,
    r: complex,
    l_prime: complex,
    r_prime: complex,
    sources: tuple[str, str] = ("A", "B"),
    targets: tuple[str, str] = ("L", "R"),
) -> DeformationSpec:
    """Deformation sending two localized constituents onto two shared modes.

    The first source mode maps to ``l|target_1> + r|target_2>`` and the
    second to ``l'|target_1> + r'|target_2>``; internal dofs are untouched.
    Each amplitude pair must be normalized: |l|^2 + |r|^2 = 1 (same for the
    primed pair).
    """
    t1, t2 = targets
    s1, s2 = sources
    u1 = spatial_unitary(basis, {s1: {t1: l, t2: r}}, label=f"{s1}->({l:.3g}){t1}+({r:.3g}){t2}")
    u2 = spatial_unitary(basis, {s2: {t1: l_prime, t2: r_prime}}, label=f"{s2}->({l_prime:.3g}){t1}+({r_prime:.3g}){t2}")
    return DeformationSpec(((u1, Region.of(s1)), (u2, Region.of(s2))))


def _assignments(weights: np.ndarray) -> Iterator[tuple[tuple[int, ...], float]]:
    """Yield (assignment, weight product) over permutations with nonzero
    weight; position i of the assignment is the factor taken by slot i."""
    n = weights.shape[0]
    used = [False] * n
    chosen: list[int] = []

    def recurse(slot: int, acc: float):
        if slot == n:
            yield tuple(chosen), acc
            return
        row = weights[slot]
        for j in range(n):
            if used[j] or row[j] <= ZERO_TOL:
                continue
            used[j] = True
            chosen.append(j)
            yield from recurse(slot + 1, acc * row[j])
            chosen.pop()
            used[j] = False

    yield from recurse(0, 1.0)


def deform(spec: DeformationSpec, state: NState) -> NState:
    """Apply a deformation to a pure state; the result is canonicalized.

    Every region must have support on at least one constituent of every
    term.  The result is generally unnormalized (and can even vanish);
    callers normalize explicitly, or go through :func:`deform_ensemble`.
    """
    if state.is_zero:
        return state
    if state.n != spec.n:
        raise StructureError(f"deformation has {spec.n} pairs but the state has {state.n} particles")
    eta = state.statistics.eta
    unitaries = [u for u, _ in spec.pairs]
    regions = [r for _, r in spec.pairs]
    out_terms: list[ProductKet] = []
    for t_index, term in enumerate(state.terms):
        weights = np.array([[region_weight(reg, f) for f in term.factors] for reg in regions])
        for i, reg in enumerate(regions):
            if weights[i].max() <= ZERO_TOL:
                raise DeformationUndefinedError(
                    f"region {reg} acts on no constituent of term {t_index}"
                )
        applied: dict[tuple[int, int], SingleParticleState] = {}
        for assignment, weight in _assignments(weights):
            sign = -1 if (eta == -1 and permutation_parity(assignment)) else 1
            factors = []
            for slot, j in enumerate(assignment):
                key = (slot, j)
                if key not in applied:
                    applied[key] = unitaries[slot].apply(term.factors[j])
                factors.append(applied[key])
            out_terms.append(ProductKet(term.coefficient * weight * sign, tuple(factors)))
    return canonicalize(NState(state.statistics, tuple(out_terms)))


def deform_ensemble(spec: DeformationSpec, rho: Ensemble) -> Ensemble:
    """Deform every member and renormalize the mixture.

    Realizes rho -> D rho D^dag / Tr[D^dag D rho] as a per-member squared
    norm reweighting followed by a global renormalization; members whose
    image vanishes drop out of the mixture.
    """
    reweighted: list[tuple[float, NState]] = []
    for weight, member in rho.members:
        if weight <= ZERO_TOL:
            continue
        before = norm_squared(member)
        if before <= ZERO_TOL:
            raise DegenerateStateError("ensemble member has vanishing norm")
        image = deform(spec, member)
        after = norm_squared(image)
        gain = after / before
        if gain <= ZERO_TOL:
            continue
        reweighted.append((weight * gain, image * (1.0 / np.sqrt(after))))
    total = sum(w for w, _ in reweighted)
    if total <= ZERO_TOL:
        raise DegenerateStateError("deformed ensemble has vanishing trace")
    return Ensemble(tuple((w / total, s) for w, s in reweighted))


@dataclass(frozen=True)
class UnitarityReport:
    """Diagnostic norm comparison of a deformation over probe states."""

    probes: tuple[tuple[float, float], ...]  # (norm before, norm after)

    @property
    def deviations(self) -> tuple[float, ...]:
        return tuple(abs(after - before) for before, after in self.probes)

    @property
    def max_deviation(self) -> float:
        return max(self.deviations) if self.probes else 0.0

    def preserves_norms(self, tol: float = EQ_TOL) -> bool:
        return self.max_deviation <= tol


def check_unitarity(spec: DeformationSpec, probes: Sequence[NState]) -> UnitarityReport:
    """Compare probe norms before and after deformation (diagnostic only)."""
    rows = []
    for probe in probes:
        rows.append((norm(probe), norm(deform(spec, probe))))
    return UnitarityReport(tuple(rows))
