"""Two-qubit entanglement measures and local noise channels.

Channels act in the distinguishable regime only: the target is either a
labeled two-qubit object or an unlabeled state whose constituents sit on
disjoint regions, one per region, which is first mapped isomorphically to
the labeled space, transformed, and mapped back as a mixture.

Channel conventions (the level order is the basis' internal level order,
written (up, down) below):

* phase damping: K0 = diag(1, sqrt(1-q)), K1 = diag(0, sqrt(q));
* amplitude damping: decays toward the *first* level, i.e. |down> -> |up>
  with K1 moving amplitude sqrt(q); "up" is the stable state;
* depolarizing: standard four-operator set, rho -> (1-q) rho + q I/2 on the
  target qubit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ChannelUndefinedError, StructureError
from .slocc import (
    LabeledDensityMatrix,
    LabeledState,
    SloccRegions,
    labeled_to_ensemble,
    localized_labeled_state,
)
from .states import EQ_TOL, ZERO_TOL, Ensemble, NState

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])

TwoQubitLike = Union[LabeledDensityMatrix, LabeledState, np.ndarray]


def _as_matrix(rho, expected_dim: int | None = None) -> np.ndarray:
    if isinstance(rho, LabeledDensityMatrix):
        m = rho.matrix
    elif isinstance(rho, LabeledState):
        v = rho.amplitudes
        m = np.outer(v, np.conj(v))
    else:
        m = np.asarray(rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructureError(f"expected a square density matrix, got shape {m.shape}")
    if expected_dim is not None and m.shape[0] != expected_dim:
        raise StructureError(f"expected a {expected_dim}x{expected_dim} density matrix, got {m.shape[0]}x{m.shape[0]}")
    return m


def concurrence(rho: TwoQubitLike) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    C = max(0, l1 - l2 - l3 - l4) with the l_i the decreasingly sorted
    square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).  They
    are evaluated as the singular values of sqrt(rho) (sy x sy) sqrt(rho)^T,
    which is the same set but keeps full precision for near-pure states.
    """
    m = _as_matrix(rho, 4)
    eigs, vecs = np.linalg.eigh((m + np.conj(m.T)) / 2.0)
    root = (vecs * np.sqrt(np.clip(eigs, 0.0, None))) @ np.conj(vecs.T)
    flip = np.kron(_SIGMA_Y, _SIGMA_Y)
    lam = np.linalg.svd(root @ flip @ root.T, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def binary_entropy(p: float) -> float:
    """H2(p) = -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0."""
    total = 0.0
    for x in (p, 1.0 - p):
        if x > 0.0:
            total -= x * np.log2(x)
    return total


def entanglement_of_formation(rho: TwoQubitLike) -> float:
    """EoF = H2((1 + sqrt(1 - C^2)) / 2) from the concurrence C."""
    c = min(1.0, max(0.0, concurrence(rho)))
    return binary_entropy((1.0 + np.sqrt(1.0 - c * c)) / 2.0)


def von_neumann_entropy(rho) -> float:
    """-sum_i lambda_i log2 lambda_i over the density matrix spectrum."""
    m = _as_matrix(rho)
    if np.max(np.abs(m - np.conj(m.T))) > EQ_TOL:
        raise StructureError("density matrix must be Hermitian")
    eigs = np.linalg.eigvalsh((m + np.conj(m.T)) / 2.0)
    if np.min(eigs) < -EQ_TOL:
        raise StructureError(f"density matrix is not positive semidefinite (min eigenvalue {np.min(eigs):.3e})")
    entropy = 0.0
    for value in np.clip(eigs, 0.0, None):
        if value > 0.0:
            entropy -= value * np.log2(value)
    return max(float(entropy), 0.0)


def fidelity(rho: TwoQubitLike, target: Union[LabeledState, np.ndarray]) -> float:
    """<target|rho|target> for a pure target state."""
    vector = target.amplitudes if isinstance(target, LabeledState) else np.asarray(target, dtype=complex)
    m = _as_matrix(rho, vector.shape[0])
    return float(np.real(np.conj(vector) @ m @ vector))


# ---------------------------------------------------------------------------
# Local noise channels
# ---------------------------------------------------------------------------

CHANNEL_NAMES = ("phase_damping", "depolarizing", "amplitude_damping")


@dataclass(frozen=True)
class KrausChannel:
    """A single-qubit channel as a trace-preserving set of 2x2 operators."""

    name: str
    strength: float
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        completeness = sum(np.conj(k.T) @ k for k in ops)
        if np.max(np.abs(completeness - np.eye(2))) > EQ_TOL:
            raise StructureError(f"Kraus operators of {self.name!r} do not resolve the identity")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)


def _check_strength(q: float) -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise StructureError(f"channel strength must lie in [0, 1], got {q}")
    return q


def phase_damping(q: float) -> KrausChannel:
    q = _check_strength(q)
    return KrausChannel(
        "phase_damping",
        q,
        (np.diag([1.0, np.sqrt(1.0 - q)]), np.diag([0.0, np.sqrt(q)])),
    )


def amplitude_damping(q: float) -> KrausChannel:
    q = _check_strength(q)
    return KrausChannel(
        "amplitude_damping",
        q,
        (
            np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - q)]]),
            np.array([[0.0, np.sqrt(q)], [0.0, 0.0]]),
        ),
    )


def depolarizing(q: float) -> KrausChannel:
    q = _check_strength(q)
    pauli = (
        np.eye(2),
        np.array([[0.0, 1.0], [1.0, 0.0]]),
        _SIGMA_Y,
        np.diag([1.0, -1.0]),
    )
    weights = (np.sqrt(1.0 - 3.0 * q / 4.0), np.sqrt(q / 4.0), np.sqrt(q / 4.0), np.sqrt(q / 4.0))
    return KrausChannel("depolarizing", q, tuple(w * p for w, p in zip(weights, pauli)))


def channel(name: str, q: float) -> KrausChannel:
    """Channel constructor by name; see :data:`CHANNEL_NAMES`."""
    try:
        factory = {"phase_damping": phase_damping, "depolarizing": depolarizing, "amplitude_damping": amplitude_damping}[name]
    except KeyError:
        raise StructureError(f"unknown channel {name!r}; choose one of {', '.join(CHANNEL_NAMES)}") from None
    return factory(q)


def _apply_kraus_two_qubit(ch: KrausChannel, qubit: int, matrix: np.ndarray) -> np.ndarray:
    if qubit not in (0, 1):
        raise StructureError("qubit index must be 0 or 1")
    out = np.zeros_like(matrix)
    for k in ch.kraus:
        op = np.kron(k, np.eye(2)) if qubit == 0 else np.kron(np.eye(2), k)
        out += op @ matrix @ np.conj(op.T)
    return out


def apply_local_channel(
    ch: KrausChannel,
    qubit: int,
    target: Union[LabeledDensityMatrix, NState, Ensemble],
    regions: SloccRegions | None = None,
):
    """Apply a single-qubit channel to one constituent.

    * ``LabeledDensityMatrix`` targets (two regions, two levels) transform
      in place and return a new :class:`LabeledDensityMatrix`.
    * ``NState`` / ``Ensemble`` targets must be distinguishable two-qubit
      objects: one constituent per (given) region, spatially disjoint.  They
      come back as an :class:`Ensemble`; anything not localized this way
      raises :class:`ChannelUndefinedError`, since noise acting on
      indistinguishable constituents is out of scope.
    """
    if isinstance(target, LabeledDensityMatrix):
        if target.regions.n != 2 or target.basis.n_internal != 2:
            raise StructureError("channels act on two-region, two-level labeled objects")
        return LabeledDensityMatrix(target.basis, target.regions, _apply_kraus_two_qubit(ch, qubit, target.matrix))

    if regions is None:
        raise StructureError("unlabeled targets need the pair of localization regions")
    if regions.n != 2:
        raise StructureError("channels act on two-region targets")

    if isinstance(target, NState):
        members = ((1.0, target),)
        statistics = target.statistics
        basis = target.basis
    elif isinstance(target, Ensemble):
        members = target.members
        statistics = target.statistics
        basis = target.basis
    else:
        raise StructureError(f"cannot apply a channel to {type(target).__name__}")
    if basis is None:
        raise StructureError("target carries no nonzero member")
    if basis.n_internal != 2:
        raise StructureError("channels act on two-level constituents")

    d = basis.n_internal ** regions.n
    matrix = np.zeros((d, d), dtype=complex)
    for weight, member in members:
        if weight <= ZERO_TOL:
            continue
        try:
            labeled = localized_labeled_state(member, regions)
        except StructureError as exc:
            raise ChannelUndefinedError(str(exc)) from exc
        matrix += weight * np.outer(labeled.amplitudes, np.conj(labeled.amplitudes))
    transformed = _apply_kraus_two_qubit(ch, qubit, matrix)
    dm = LabeledDensityMatrix(basis, regions, transformed)
    return labeled_to_ensemble(dm, statistics)
