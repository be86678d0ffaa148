"""Permutation-sum inner products for unlabeled identical particles.

The transition amplitude between two N-particle product kets is the
eta-weighted sum over all assignments of ket constituents to bra slots:

    <phi_1,..,phi_N | psi_1,..,psi_N> = sum_alpha eta^P(alpha)
        <phi_1|psi_alpha_1> ... <phi_N|psi_alpha_N>

which is the permanent (eta = +1) or determinant (eta = -1) of the overlap
matrix M[i, j] = <phi_i|psi_j>.  Inner products of superpositions expand
bilinearly over term pairs.

The permanent uses Ryser's inclusion-exclusion formula with Gray-code
subset iteration, blocked so the low-order columns are handled by a
vectorized table: exact to floating precision and fast enough for 20x20
matrices in well under a second.  Matrices up to 24x24 are accepted.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .errors import DegenerateStateError, StructureError
from .states import EQ_TOL, ZERO_TOL, NState, SingleParticleState, Statistics

#: Largest matrix accepted by :func:`permanent` (2**n subsets are visited).
MAX_PERMANENT_SIZE = 24

#: Columns handled by the vectorized inclusion-exclusion table.
_BLOCK_BITS = 12


def overlap(bra: SingleParticleState, ket: SingleParticleState) -> complex:
    """Single-particle amplitude <bra|ket>; conjugate-linear in the bra."""
    if bra.basis != ket.basis:
        raise StructureError("overlap requires a shared basis")
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def overlap_matrix(
    bras: Sequence[SingleParticleState], kets: Sequence[SingleParticleState]
) -> np.ndarray:
    """N x N matrix M[i, j] = <bra_i|ket_j>."""
    if len(bras) != len(kets):
        raise StructureError("overlap matrix must be square")
    b = np.array([s.amplitudes for s in bras])
    k = np.array([s.amplitudes for s in kets])
    if b.shape[1] != k.shape[1]:
        raise StructureError("overlap requires a shared basis")
    return np.conj(b) @ k.T


def _as_square(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructureError(f"expected a square matrix, got shape {m.shape}")
    return m


def _permanent_small(m: np.ndarray) -> complex:
    """Direct permutation sum; used for n <= 3."""
    n = m.shape[0]
    total = 0.0 + 0.0j
    rows = range(n)
    for perm in itertools.permutations(rows):
        p = 1.0 + 0.0j
        for i in rows:
            p *= m[i, perm[i]]
        total += p
    return total


def _permanent_ryser(m: np.ndarray) -> complex:
    """Blocked Ryser: Gray-code iteration over high columns, vectorized
    inclusion-exclusion table over the low ``_BLOCK_BITS`` columns."""
    n = m.shape[0]
    b = min(_BLOCK_BITS, n)
    low = np.arange(1 << b, dtype=np.int64)
    bits = ((low[:, None] >> np.arange(b)) & 1).astype(np.complex128)
    low_rowsums = bits @ m[:, :b].T                      # (2**b, n)
    low_signs = 1.0 - 2.0 * (bits.real.sum(axis=1).astype(np.int64) & 1)

    total = np.sum(low_signs * np.prod(low_rowsums, axis=1))
    high_cols = [np.ascontiguousarray(m[:, j]) for j in range(b, n)]
    high_rowsum = np.zeros(n, dtype=complex)
    gray = 0
    high_sign = 1.0
    for k in range(1, 1 << (n - b)):
        new_gray = k ^ (k >> 1)
        bit = new_gray ^ gray
        j = bit.bit_length() - 1
        if new_gray & bit:
            high_rowsum += high_cols[j]
        else:
            high_rowsum -= high_cols[j]
        gray = new_gray
        high_sign = -high_sign
        total += high_sign * np.sum(low_signs * np.prod(low_rowsums + high_rowsum, axis=1))
    return complex(total * ((-1) ** n))


def permanent(matrix) -> complex:
    """Permanent of a complex square matrix (all permutation signs +1)."""
    m = _as_square(matrix)
    n = m.shape[0]
    if n > MAX_PERMANENT_SIZE:
        raise StructureError(f"permanent limited to {MAX_PERMANENT_SIZE}x{MAX_PERMANENT_SIZE} matrices")
    if n == 0:
        return 1.0 + 0.0j
    if n <= 3:
        return _permanent_small(m)
    return _permanent_ryser(m)


def determinant(matrix) -> complex:
    """Determinant via LU with partial pivoting (LAPACK)."""
    m = _as_square(matrix)
    if m.shape[0] == 0:
        return 1.0 + 0.0j
    return complex(np.linalg.det(m))


def eta_sum(matrix, statistics) -> complex:
    """Permanent for bosons, determinant for fermions."""
    stats = Statistics.coerce(statistics)
    return permanent(matrix) if stats is Statistics.BOSONS else determinant(matrix)


def inner_product(bra: NState, ket: NState) -> complex:
    """Transition amplitude <bra|ket>, bilinear over superposition terms."""
    if bra.statistics is not ket.statistics:
        raise StructureError("inner product requires matching statistics")
    if bra.is_zero or ket.is_zero:
        return 0.0 + 0.0j
    if bra.n != ket.n:
        raise StructureError(f"particle numbers differ: {bra.n} vs {ket.n}")
    if bra.basis != ket.basis:
        raise StructureError("inner product requires a shared basis")
    total = 0.0 + 0.0j
    for bterm in bra.terms:
        for kterm in ket.terms:
            m = overlap_matrix(bterm.factors, kterm.factors)
            total += np.conj(bterm.coefficient) * kterm.coefficient * eta_sum(m, bra.statistics)
    return complex(total)


def norm_squared(state: NState) -> float:
    """<state|state> as a real number; tiny negative noise clamps to zero."""
    value = inner_product(state, state).real
    if value < 0.0:
        if value < -EQ_TOL:
            raise StructureError(f"squared norm is significantly negative: {value:.3e}")
        value = 0.0
    return value


def norm(state: NState) -> float:
    return float(np.sqrt(norm_squared(state)))


def normalize(state: NState) -> NState:
    """State scaled to unit norm; zero-norm states are degenerate."""
    n = norm(state)
    if n <= ZERO_TOL:
        raise DegenerateStateError("cannot normalize a state of vanishing norm")
    return state * (1.0 / n)
