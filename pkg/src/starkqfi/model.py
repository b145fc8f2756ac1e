"""Probe definitions and Hamiltonian builders.

Two probe classes share the same graded on-site potential V_j:

* a single particle hopping on an open chain of L sites, and
* an interacting spin chain at half filling (zero total magnetization),
  with the field coupled through sigma^z weighted by V_j.

All builders are pure functions returning freshly allocated arrays; nothing
here mutates shared state, so results can be passed freely across workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np
from scipy import sparse


class ProfileKind(Enum):
    EXPONENTIAL = "exponential"
    POWER_LAW = "power-law"


class ProbeClass(Enum):
    SINGLE_PARTICLE = "sp"
    MANY_BODY = "mb"


@dataclass(frozen=True)
class PotentialProfile:
    """Shape of the on-site gradient, V_j = e^(a j) or V_j = j^gamma."""

    kind: ProfileKind
    rate: float | None = None      # a, exponential profiles
    exponent: float | None = None  # gamma, power-law profiles

    def __post_init__(self):
        if self.kind is ProfileKind.EXPONENTIAL:
            if self.rate is None or self.rate <= 0:
                raise ValueError(f"exponential profile needs rate a > 0, got {self.rate}")
        elif self.kind is ProfileKind.POWER_LAW:
            if self.exponent is None or self.exponent <= 0:
                raise ValueError(
                    f"power-law profile needs exponent gamma > 0, got {self.exponent}"
                )

    @staticmethod
    def exponential(a: float) -> "PotentialProfile":
        return PotentialProfile(ProfileKind.EXPONENTIAL, rate=a)

    @staticmethod
    def power_law(gamma: float) -> "PotentialProfile":
        return PotentialProfile(ProfileKind.POWER_LAW, exponent=gamma)


@dataclass(frozen=True)
class ProbeSpec:
    """Full problem definition: probe class, size, couplings and field."""

    probe_class: ProbeClass
    L: int
    h: float
    profile: PotentialProfile
    J: float = 1.0

    def __post_init__(self):
        if self.L < 2:
            raise ValueError(f"need L >= 2, got {self.L}")
        if self.J <= 0:
            raise ValueError(f"need J > 0, got {self.J}")
        if self.probe_class is ProbeClass.MANY_BODY and self.L % 2:
            raise ValueError(f"many-body probe needs even L (half filling), got {self.L}")

    def with_h(self, h: float) -> "ProbeSpec":
        return ProbeSpec(self.probe_class, self.L, h, self.profile, self.J)

    @staticmethod
    def single_particle(L: int, h: float, a: float, J: float = 1.0) -> "ProbeSpec":
        return ProbeSpec(ProbeClass.SINGLE_PARTICLE, L, h, PotentialProfile.exponential(a), J)

    @staticmethod
    def many_body(L: int, h: float, a: float, J: float = 1.0) -> "ProbeSpec":
        return ProbeSpec(ProbeClass.MANY_BODY, L, h, PotentialProfile.exponential(a), J)


def potential_values(profile: PotentialProfile, L: int) -> np.ndarray:
    """V_1..V_L for the given profile; strictly increasing for a, gamma > 0."""
    if L < 1:
        raise ValueError(f"need L >= 1, got {L}")
    j = np.arange(1, L + 1, dtype=float)
    if profile.kind is ProfileKind.EXPONENTIAL:
        return np.exp(profile.rate * j)
    return j ** profile.exponent


def build_sp_hamiltonian(spec: ProbeSpec) -> np.ndarray:
    """Open-boundary tight-binding matrix: -J on the two first off-diagonals,
    h*V_j on the diagonal."""
    if spec.probe_class is not ProbeClass.SINGLE_PARTICLE:
        raise ValueError("build_sp_hamiltonian needs a single-particle spec")
    V = potential_values(spec.profile, spec.L)
    H = np.diag(spec.h * V)
    off = -spec.J * np.ones(spec.L - 1)
    H += np.diag(off, 1) + np.diag(off, -1)
    return H


@dataclass(frozen=True)
class SectorBasis:
    """Zero-magnetization occupation basis, n_up = L/2.

    States are L-bit integers with bit (j-1) = occupation of site j (bit set
    means spin up), listed in ascending integer order; that ordering is fixed
    so sweep outputs are reproducible byte for byte.
    """

    L: int
    states: tuple[int, ...]
    index: dict[int, int] = field(repr=False)

    @property
    def n_up(self) -> int:
        return self.L // 2

    @property
    def dim(self) -> int:
        return len(self.states)

    def magnetization_signs(self, state: int) -> np.ndarray:
        """sigma^z eigenvalues (+1 up / -1 down) for sites 1..L."""
        bits = (state >> np.arange(self.L)) & 1
        return 2 * bits.astype(float) - 1.0


def sector_basis(L: int) -> SectorBasis:
    if L < 2 or L % 2:
        raise ValueError(f"zero-magnetization sector needs even L >= 2, got {L}")
    states = []
    for occupied in combinations(range(L), L // 2):
        s = 0
        for b in occupied:
            s |= 1 << b
        states.append(s)
    states.sort()
    return SectorBasis(L=L, states=tuple(states), index={s: i for i, s in enumerate(states)})


def build_field_generator(spec: ProbeSpec, basis: SectorBasis | None = None) -> np.ndarray:
    """Diagonal of the field generator H_0 (returned as a 1-D array).

    Single particle: V_j itself.  Many body: sum_j V_j s_j in the sector
    basis, s_j = +1/-1 for bit set/clear.
    """
    V = potential_values(spec.profile, spec.L)
    if spec.probe_class is ProbeClass.SINGLE_PARTICLE:
        if basis is not None:
            raise ValueError("single-particle generator takes no sector basis")
        return V.copy()
    if basis is None:
        raise ValueError("many-body generator needs the sector basis")
    if basis.L != spec.L:
        raise ValueError(f"basis is for L={basis.L}, spec has L={spec.L}")
    diag = np.empty(basis.dim)
    for i, s in enumerate(basis.states):
        diag[i] = V @ basis.magnetization_signs(s)
    return diag


def _mb_elements(spec: ProbeSpec, basis: SectorBasis):
    """Shared construction for the dense and sparse many-body builders."""
    if spec.probe_class is not ProbeClass.MANY_BODY:
        raise ValueError("build_mb_hamiltonian needs a many-body spec")
    if basis.L != spec.L:
        raise ValueError(f"basis is for L={basis.L}, spec has L={spec.L}")
    L = spec.L
    V = potential_values(spec.profile, L)
    diag = np.empty(basis.dim)
    rows, cols = [], []
    for i, s in enumerate(basis.states):
        sz = basis.magnetization_signs(s)
        diag[i] = -np.sum(sz[:-1] * sz[1:]) + spec.h * (V @ sz)
        for b in range(L - 1):
            if ((s >> b) & 1) != ((s >> (b + 1)) & 1):
                j = basis.index[s ^ (1 << b) ^ (1 << (b + 1))]
                rows.append(i)
                cols.append(j)
    return diag, rows, cols


def build_mb_hamiltonian(spec: ProbeSpec, basis: SectorBasis) -> np.ndarray:
    """Dense sector matrix of -sum_j (xx + yy + zz) + h sum_j V_j sigma_j^z.

    The xx+yy part connects patterns differing by one adjacent bit swap with
    element -2 (Pauli convention, sigma^z |up> = +|up>); zz and the field are
    diagonal.  Open boundaries.
    """
    diag, rows, cols = _mb_elements(spec, basis)
    H = np.diag(diag)
    H[rows, cols] = -2.0
    return H


def build_mb_hamiltonian_sparse(spec: ProbeSpec, basis: SectorBasis) -> sparse.csr_matrix:
    """CSR variant of build_mb_hamiltonian for iterative extremal solves."""
    diag, rows, cols = _mb_elements(spec, basis)
    n = basis.dim
    data = np.concatenate([diag, -2.0 * np.ones(len(rows))])
    r = np.concatenate([np.arange(n), np.asarray(rows, dtype=int)])
    c = np.concatenate([np.arange(n), np.asarray(cols, dtype=int)])
    return sparse.csr_matrix((data, (r, c)), shape=(n, n))


def neel_pattern(L: int) -> int:
    """Bit pattern of the alternating up/down product state, site 1 up."""
    pattern = 0
    for b in range(0, L, 2):
        pattern |= 1 << b
    return pattern
