"""State model for identical particles without particle labels.

An N-particle ket is stored as an ordered list of single-particle states
with a scalar coefficient.  Exchange statistics never symmetrize the stored
data; they enter through the transition amplitudes (see ``nolabel.kernels``)
and through the swap rule ``|.., psi_j, .., psi_i, ..> = eta * |.., psi_i,
.., psi_j, ..>`` used by :func:`canonicalize` to merge equivalent terms.

Single-particle states live on a discrete :class:`ModeBasis`: a finite set
of named spatial modes tensored with zero or more internal degrees of
freedom, each with a finite number of named levels.  All values in this
module are immutable; every operation returns new objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import BasisMismatchError, StructureError

#: Coefficients with modulus at or below this are clipped to zero.
ZERO_TOL = 1e-12

#: Tolerance for numerical equality checks throughout the package.
EQ_TOL = 1e-9


class Statistics(Enum):
    """Exchange statistics; the enum value is the exchange factor eta."""

    BOSONS = 1
    FERMIONS = -1

    @property
    def eta(self) -> int:
        return self.value

    @classmethod
    def coerce(cls, value: Union["Statistics", int, str]) -> "Statistics":
        """Accept a Statistics member, +1/-1, or a (case-insensitive) name."""
        if isinstance(value, cls):
            return value
        if isinstance(value, (int, np.integer)):
            if value == 1:
                return cls.BOSONS
            if value == -1:
                return cls.FERMIONS
            raise StructureError(f"exchange factor must be +1 or -1, got {value}")
        if isinstance(value, str):
            name = value.strip().lower()
            if name in ("bosons", "boson", "b"):
                return cls.BOSONS
            if name in ("fermions", "fermion", "f"):
                return cls.FERMIONS
            raise StructureError(f"unknown statistics {value!r} (use 'bosons' or 'fermions')")
        raise StructureError(f"cannot interpret {value!r} as statistics")


def permutation_parity(perm: Sequence[int]) -> int:
    """Parity (0 even, 1 odd) of a permutation of 0..n-1, by inversion count."""
    inversions = 0
    n = len(perm)
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j]:
                inversions += 1
    return inversions & 1


@dataclass(frozen=True)
class ModeBasis:
    """Discrete single-particle basis: named spatial modes x internal levels.

    ``internal`` is an ordered tuple of ``(dof_name, (level, level, ...))``
    pairs.  Basis vectors ``|mode, config>`` are orthonormal by construction;
    a state is a complex amplitude vector over the flat index
    ``mode_index * n_internal + config_index`` with configs enumerated in
    row-major order over the internal degrees of freedom.
    """

    spatial_modes: tuple[str, ...]
    internal: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def __post_init__(self):
        modes = tuple(str(m) for m in self.spatial_modes)
        object.__setattr__(self, "spatial_modes", modes)
        if not modes:
            raise StructureError("basis needs at least one spatial mode")
        if len(set(modes)) != len(modes):
            raise StructureError("spatial mode identifiers must be unique")
        internal = tuple((str(name), tuple(str(v) for v in levels)) for name, levels in self.internal)
        object.__setattr__(self, "internal", internal)
        names = [name for name, _ in internal]
        if len(set(names)) != len(names):
            raise StructureError("internal degree-of-freedom names must be unique")
        for name, levels in internal:
            if len(levels) < 1:
                raise StructureError(f"internal dof {name!r} needs at least one level")
            if len(set(levels)) != len(levels):
                raise StructureError(f"internal dof {name!r} has duplicate level names")

    @cached_property
    def n_spatial(self) -> int:
        return len(self.spatial_modes)

    @cached_property
    def n_internal(self) -> int:
        size = 1
        for _, levels in self.internal:
            size *= len(levels)
        return size

    @cached_property
    def dim(self) -> int:
        return self.n_spatial * self.n_internal

    @cached_property
    def internal_configs(self) -> tuple[tuple[int, ...], ...]:
        """All internal configurations as tuples of level indices, in order."""
        ranges = [range(len(levels)) for _, levels in self.internal]
        return tuple(itertools.product(*ranges))

    @cached_property
    def _mode_index(self) -> dict[str, int]:
        return {m: i for i, m in enumerate(self.spatial_modes)}

    @cached_property
    def _config_index(self) -> dict[tuple[int, ...], int]:
        return {cfg: i for i, cfg in enumerate(self.internal_configs)}

    def mode_index(self, mode: str) -> int:
        try:
            return self._mode_index[mode]
        except KeyError:
            raise BasisMismatchError(f"unknown spatial mode {mode!r}") from None

    def config_of(self, levels: Mapping[str, Union[str, int]]) -> tuple[int, ...]:
        """Internal configuration (tuple of level indices) from a dof->level map."""
        unknown = set(levels) - {name for name, _ in self.internal}
        if unknown:
            raise BasisMismatchError(f"unknown internal dof(s): {sorted(unknown)}")
        config = []
        for name, names in self.internal:
            if name not in levels:
                raise StructureError(f"internal dof {name!r} not specified")
            value = levels[name]
            if isinstance(value, str):
                if value not in names:
                    raise BasisMismatchError(f"dof {name!r} has no level {value!r}")
                config.append(names.index(value))
            else:
                if not 0 <= int(value) < len(names):
                    raise BasisMismatchError(f"dof {name!r} level index {value} out of range")
                config.append(int(value))
        return tuple(config)

    def config_index(self, config: tuple[int, ...]) -> int:
        try:
            return self._config_index[tuple(config)]
        except KeyError:
            raise BasisMismatchError(f"invalid internal configuration {config!r}") from None

    def flat_index(self, mode: str, config: tuple[int, ...] = ()) -> int:
        return self.mode_index(mode) * self.n_internal + self.config_index(config)

    def config_label(self, config: tuple[int, ...]) -> str:
        """Readable label ('up' or 'up,plus' for multiple dofs; '' if none)."""
        return ",".join(levels[i] for (_, levels), i in zip(self.internal, config))

    def region_mask(self, modes: Iterable[str]) -> np.ndarray:
        """Boolean mask over flat indices selecting the given spatial modes."""
        mask = np.zeros(self.dim, dtype=bool)
        for mode in modes:
            start = self.mode_index(mode) * self.n_internal
            mask[start:start + self.n_internal] = True
        return mask

    def ket(self, mode: str, **levels: Union[str, int]) -> "SingleParticleState":
        """Basis state ``|mode, levels>``; all internal dofs must be given."""
        amplitudes = np.zeros(self.dim, dtype=complex)
        amplitudes[self.flat_index(mode, self.config_of(levels))] = 1.0
        return SingleParticleState(self, amplitudes)


@dataclass(frozen=True)
class Region:
    """A nonempty set of spatial modes; the locus of an operation or detector."""

    modes: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "modes", frozenset(str(m) for m in self.modes))
        if not self.modes:
            raise StructureError("a region must contain at least one spatial mode")

    @classmethod
    def of(cls, *modes: str) -> "Region":
        return cls(frozenset(modes))

    def validate(self, basis: ModeBasis) -> None:
        extra = self.modes - set(basis.spatial_modes)
        if extra:
            raise BasisMismatchError(f"region modes {sorted(extra)} not in basis")

    def __repr__(self) -> str:
        return f"Region({{{', '.join(sorted(self.modes))}}})"


class SingleParticleState:
    """Complex amplitude vector over one particle's (mode x internal) basis."""

    __slots__ = ("basis", "amplitudes", "_bytes", "_sort_key")

    def __init__(self, basis: ModeBasis, amplitudes):
        arr = np.asarray(amplitudes, dtype=complex)
        if arr.shape != (basis.dim,):
            raise StructureError(f"amplitude vector must have shape ({basis.dim},), got {arr.shape}")
        if not np.all(np.isfinite(arr.view(float))):
            raise StructureError("amplitudes must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "amplitudes", arr)
        object.__setattr__(self, "_bytes", None)
        object.__setattr__(self, "_sort_key", None)

    def __setattr__(self, name, value):
        raise AttributeError("SingleParticleState is immutable")

    def amplitude(self, mode: str, **levels: Union[str, int]) -> complex:
        return complex(self.amplitudes[self.basis.flat_index(mode, self.basis.config_of(levels))])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "SingleParticleState":
        n = self.norm()
        if n <= ZERO_TOL:
            from .errors import DegenerateStateError

            raise DegenerateStateError("cannot normalize a zero single-particle state")
        return SingleParticleState(self.basis, self.amplitudes / n)

    @property
    def id_bytes(self) -> bytes:
        """Exact-value identity used for term merging."""
        if self._bytes is None:
            object.__setattr__(self, "_bytes", self.amplitudes.tobytes())
        return self._bytes

    @property
    def sort_key(self) -> tuple:
        """Deterministic total order: (re, im) pairs in basis order."""
        if self._sort_key is None:
            flat = self.amplitudes.view(float)
            object.__setattr__(self, "_sort_key", tuple(flat.tolist()))
        return self._sort_key

    def _check_basis(self, other: "SingleParticleState") -> None:
        if self.basis != other.basis:
            raise BasisMismatchError("single-particle states live on different bases")

    def __add__(self, other: "SingleParticleState") -> "SingleParticleState":
        self._check_basis(other)
        return SingleParticleState(self.basis, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "SingleParticleState") -> "SingleParticleState":
        self._check_basis(other)
        return SingleParticleState(self.basis, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar) -> "SingleParticleState":
        return SingleParticleState(self.basis, self.amplitudes * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "SingleParticleState":
        return SingleParticleState(self.basis, self.amplitudes / complex(scalar))

    def __neg__(self) -> "SingleParticleState":
        return SingleParticleState(self.basis, -self.amplitudes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SingleParticleState):
            return NotImplemented
        return self.basis == other.basis and self.id_bytes == other.id_bytes

    def __hash__(self) -> int:
        return hash((self.basis, self.id_bytes))

    def isclose(self, other: "SingleParticleState", tol: float = EQ_TOL) -> bool:
        self._check_basis(other)
        return bool(np.max(np.abs(self.amplitudes - other.amplitudes)) <= tol)

    def __repr__(self) -> str:
        parts = []
        for i, amp in enumerate(self.amplitudes):
            if abs(amp) > ZERO_TOL:
                mode = self.basis.spatial_modes[i // self.basis.n_internal]
                cfg = self.basis.internal_configs[i % self.basis.n_internal]
                label = self.basis.config_label(cfg)
                key = f"{mode},{label}" if label else mode
                parts.append(f"{amp:.4g}|{key}>")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class ProductKet:
    """A coefficient times an ordered list of N single-particle states."""

    coefficient: complex
    factors: tuple[SingleParticleState, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficient", complex(self.coefficient))
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 1:
            raise StructureError("a product ket needs at least one factor")
        basis = self.factors[0].basis
        for f in self.factors[1:]:
            if f.basis != basis:
                raise BasisMismatchError("all factors of a product ket must share one basis")

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def basis(self) -> ModeBasis:
        return self.factors[0].basis

    def scaled(self, scalar) -> "ProductKet":
        return ProductKet(self.coefficient * complex(scalar), self.factors)


@dataclass(frozen=True)
class NState:
    """Formal linear combination of product kets with fixed exchange statistics.

    The empty combination (``terms == ()``) represents the zero state; its
    particle number is undefined.  Use :func:`canonicalize` to reach the
    unique representative under the swap rule.
    """

    statistics: Statistics
    terms: tuple[ProductKet, ...]

    def __post_init__(self):
        if not isinstance(self.statistics, Statistics):
            raise StructureError("statistics must be a Statistics member")
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.terms:
            n = self.terms[0].n
            basis = self.terms[0].basis
            for t in self.terms[1:]:
                if t.n != n:
                    raise StructureError("terms mix different particle numbers")
                if t.basis != basis:
                    raise BasisMismatchError("terms live on different bases")

    @classmethod
    def product(cls, statistics, factors: Sequence[SingleParticleState], coefficient=1.0) -> "NState":
        return cls(Statistics.coerce(statistics), (ProductKet(coefficient, tuple(factors)),))

    @classmethod
    def zero(cls, statistics) -> "NState":
        return cls(Statistics.coerce(statistics), ())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def n(self):
        return self.terms[0].n if self.terms else None

    @property
    def basis(self):
        return self.terms[0].basis if self.terms else None

    def _check_compatible(self, other: "NState") -> None:
        if self.statistics is not other.statistics:
            raise StructureError("statistics mismatch")
        if self.terms and other.terms:
            if self.n != other.n:
                raise StructureError("particle number mismatch")
            if self.basis != other.basis:
                raise BasisMismatchError("basis mismatch")

    def __add__(self, other: "NState") -> "NState":
        self._check_compatible(other)
        return NState(self.statistics, self.terms + other.terms)

    def __sub__(self, other: "NState") -> "NState":
        return self + (-other)

    def __neg__(self) -> "NState":
        return self * (-1.0)

    def __mul__(self, scalar) -> "NState":
        return NState(self.statistics, tuple(t.scaled(scalar) for t in self.terms))

    __rmul__ = __mul__

    def canonical(self) -> "NState":
        return canonicalize(self)


def canonicalize(state: NState) -> NState:
    """Unique representative of an NState under the exchange swap rule.

    Each term's factors are sorted by the deterministic single-particle
    order (lexicographic over the amplitude table, real then imaginary
    part), the coefficient picks up eta**P for the sorting permutation's
    parity P, terms with identical sorted factor lists are merged, and
    near-zero terms are dropped.  Idempotent.
    """
    eta = state.statistics.eta
    merged: dict[tuple[bytes, ...], list] = {}
    for term in state.terms:
        keys = [f.sort_key for f in term.factors]
        order = sorted(range(len(keys)), key=keys.__getitem__)
        sign = -1 if (eta == -1 and permutation_parity(order)) else 1
        factors = tuple(term.factors[i] for i in order)
        ident = tuple(f.id_bytes for f in factors)
        entry = merged.get(ident)
        if entry is None:
            merged[ident] = [term.coefficient * sign, factors]
        else:
            entry[0] += term.coefficient * sign
    kept = [(ident, coeff, factors) for ident, (coeff, factors) in merged.items() if abs(coeff) > ZERO_TOL]
    kept.sort(key=lambda item: tuple(f.sort_key for f in item[2]))
    return NState(state.statistics, tuple(ProductKet(coeff, factors) for _, coeff, factors in kept))


@dataclass(frozen=True)
class Ensemble:
    """Convex mixture of NStates: ``((weight, state), ...)`` with weights
    summing to one.  Members are expected to be individually normalized."""

    members: tuple[tuple[float, NState], ...]

    def __post_init__(self):
        members = tuple((float(w), s) for w, s in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise StructureError("ensemble needs at least one member")
        total = 0.0
        first = members[0][1]
        for w, s in members:
            if w < -ZERO_TOL:
                raise StructureError(f"negative ensemble weight {w}")
            total += w
            if s.statistics is not first.statistics:
                raise StructureError("ensemble members mix statistics")
            if s.terms and first.terms and (s.n != first.n or s.basis != first.basis):
                raise StructureError("ensemble members mix particle numbers or bases")
        if abs(total - 1.0) > EQ_TOL:
            raise StructureError(f"ensemble weights must sum to 1, got {total:.12g}")

    @classmethod
    def pure(cls, state: NState) -> "Ensemble":
        return cls(((1.0, state),))

    @property
    def statistics(self) -> Statistics:
        return self.members[0][1].statistics

    @property
    def n(self):
        for _, s in self.members:
            if s.terms:
                return s.n
        return None

    @property
    def basis(self):
        for _, s in self.members:
            if s.terms:
                return s.basis
        return None


# ---------------------------------------------------------------------------
# Preset states over the two-region, spin-1/2 protocol basis
# ---------------------------------------------------------------------------

PRESET_NAMES = ("product_AB", "bell_singlet", "bell_triplet", "custom")


def default_protocol_basis() -> ModeBasis:
    """Four spatial modes (two sources A, B and two targets L, R), spin-1/2."""
    return ModeBasis(("A", "B", "L", "R"), (("spin", ("up", "down")),))


def _pair_kets(basis, modes, spins, dof):
    m1, m2 = modes
    s1, s2 = spins
    return (
        basis.ket(m1, **{dof: s1}),
        basis.ket(m2, **{dof: s2}),
        basis.ket(m1, **{dof: s2}),
        basis.ket(m2, **{dof: s1}),
    )


def build_preset(
    name: str,
    statistics,
    basis: ModeBasis | None = None,
    modes: tuple[str, str] = ("A", "B"),
    spins: tuple[str, str] = ("up", "down"),
    dof: str = "spin",
    terms=None,
    members=None,
):
    """Named two-particle states over a two-region, spin-1/2 basis.

    * ``product_AB``    -> ``|m1 s1, m2 s2>``
    * ``bell_singlet``  -> ``(|m1 s1, m2 s2> - |m1 s2, m2 s1>)/sqrt(2)``
    * ``bell_triplet``  -> ``(|m1 s1, m2 s2> + |m1 s2, m2 s1>)/sqrt(2)``
    * ``custom``        -> built from ``terms`` (an NState) or ``members``
      (an Ensemble); each term is ``(coefficient, [(mode, levels), ...])``.

    Returns an :class:`NState` (or an :class:`Ensemble` for ``custom`` with
    ``members``).
    """
    stats = Statistics.coerce(statistics)
    if basis is None:
        basis = default_protocol_basis()

    if name == "product_AB":
        k1, k2, _, _ = _pair_kets(basis, modes, spins, dof)
        return NState.product(stats, (k1, k2))
    if name in ("bell_singlet", "bell_triplet"):
        k1, k2, k3, k4 = _pair_kets(basis, modes, spins, dof)
        sign = -1.0 if name == "bell_singlet" else 1.0
        c = 1.0 / np.sqrt(2.0)
        return NState(stats, (ProductKet(c, (k1, k2)), ProductKet(sign * c, (k3, k4))))
    if name == "custom":
        if terms is not None:
            return _custom_state(stats, basis, terms)
        if members is not None:
            built = tuple((float(w), _custom_state(stats, basis, t)) for w, t in members)
            return Ensemble(built)
        raise StructureError("custom preset needs 'terms' or 'members'")
    raise StructureError(f"unknown preset {name!r}; choose one of {', '.join(PRESET_NAMES)}")


def _custom_state(stats, basis, terms) -> NState:
    kets = []
    for coeff, factor_specs in terms:
        if isinstance(coeff, (tuple, list)):  # (re, im) pair, e.g. from JSON
            coeff = complex(coeff[0], coeff[1])
        factors = []
        for mode, levels in factor_specs:
            factors.append(basis.ket(mode, **dict(levels)))
        kets.append(ProductKet(complex(coeff), tuple(factors)))
    return NState(stats, tuple(kets))
