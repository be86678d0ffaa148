"""Independent reference implementations used to cross-check the kernels.

Everything here is deliberately brute force: O(N!) permutation sums and an
explicit first-quantized tensor-product construction.  These routines are
the oracle side of the validation suite and the test suite; they share no
code path with ``nolabel.kernels``.

The (anti)symmetrized embedding carries a 1/N! prefactor, so the unlabeled
inner product relates to the embedded one by a factor of exactly N!:

    inner_product(bra, ket) = N! * <Sym(bra)|Sym(ket)>

The constant is pinned by expanding the N = 2 two-particle amplitude, which
the test suite re-derives before relying on this oracle.
"""

from __future__ import annotations

import itertools
import math
from functools import reduce

import numpy as np

from .errors import StructureError
from .states import NState, permutation_parity

#: Refuse to build embedded vectors larger than this many components.
MAX_EMBEDDED_DIM = 1_000_000


def permutations_with_parity(n: int):
    """Yield (permutation, parity) for all permutations of range(n)."""
    for perm in itertools.permutations(range(n)):
        yield perm, permutation_parity(perm)


def permanent_by_enumeration(matrix) -> complex:
    """Permutation-sum permanent; exponential time, for small matrices only."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructureError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    total = 0.0 + 0.0j
    for perm, _ in permutations_with_parity(n):
        total += np.prod(m[np.arange(n), perm]) if n else 1.0
    return complex(total)


def determinant_by_enumeration(matrix) -> complex:
    """Signed permutation-sum determinant; exponential time."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructureError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    total = 0.0 + 0.0j
    for perm, parity in permutations_with_parity(n):
        sign = -1.0 if parity else 1.0
        total += sign * (np.prod(m[np.arange(n), perm]) if n else 1.0)
    return complex(total)


def symmetrized_vector(state: NState) -> np.ndarray:
    """Embed an NState into the explicit N-fold tensor-product space.

    Each product ket maps to (1/N!) sum_alpha eta^P(alpha)
    kron(psi_alpha_1, ..., psi_alpha_N); terms add linearly.
    """
    if state.is_zero:
        raise StructureError("cannot embed the zero state without a particle number")
    n = state.n
    dim = state.basis.dim
    if dim**n > MAX_EMBEDDED_DIM:
        raise StructureError(f"embedded dimension {dim}**{n} is too large")
    eta = state.statistics.eta
    out = np.zeros(dim**n, dtype=complex)
    for term in state.terms:
        vectors = [f.amplitudes for f in term.factors]
        for perm, parity in permutations_with_parity(n):
            sign = eta**parity
            out += (term.coefficient * sign / math.factorial(n)) * reduce(
                np.kron, (vectors[p] for p in perm)
            )
    return out


def inner_product_by_symmetrization(bra: NState, ket: NState) -> complex:
    """Unlabeled inner product computed through the embedded vectors."""
    if bra.statistics is not ket.statistics:
        raise StructureError("inner product requires matching statistics")
    if bra.is_zero or ket.is_zero:
        return 0.0 + 0.0j
    if bra.n != ket.n or bra.basis != ket.basis:
        raise StructureError("operands must share particle number and basis")
    return complex(
        math.factorial(bra.n)
        * np.vdot(symmetrized_vector(bra), symmetrized_vector(ket))
    )
