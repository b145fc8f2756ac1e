"""Equilibrium QFI: eigenbasis sum, fidelity finite differences, field sweeps,
transition-point detection and localized-phase decay fits."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .model import ProbeClass, ProbeSpec, ProfileKind, SectorBasis, \
    build_field_generator, build_mb_hamiltonian, build_sp_hamiltonian, sector_basis
from .spectral import FULL_DECOMPOSITION_LIMIT, EigenDecomposition, \
    StateSelector, eigendecompose, select_state
from . import scaling

def default_fd_step(h: float) -> float:
    """Default fidelity-FD step: h-proportional with an absolute floor."""
    return max(1e-6, 1e-4 * abs(h))


#: Richardson pair (dh, dh/2) must agree to this relative tolerance.
FD_AGREEMENT_RTOL = 1e-4
FD_AGREEMENT_ATOL = 1e-6

#: h value standing in for "h -> 0" on the finite-difference path.
FD_ZERO_FIELD = 1e-8


class QfiMethod(Enum):
    EIGEN_SUM = "eigen-sum"
    FIDELITY_FD = "fidelity-fd"
    DYNAMIC = "dynamic"


class DegenerateStateError(RuntimeError):
    """Target eigenstate sits inside a degenerate multiplet."""

    def __init__(self, multiplet: Sequence[int]):
        self.multiplet = tuple(multiplet)
        super().__init__(f"degenerate multiplet at indices {self.multiplet}")


class LevelCrossingError(RuntimeError):
    """Finite-difference pair straddles a level crossing; retry with smaller dh."""


class FdConsistencyError(RuntimeError):
    """Richardson pair disagreed beyond tolerance."""


class BoundaryPeakError(RuntimeError):
    """Curve maximum sits on the grid boundary; the grid must bracket the peak."""


class SweepPointError(RuntimeError):
    """One sweep point failed; carries the offending field value."""

    def __init__(self, h: float, cause: Exception):
        self.h = h
        super().__init__(f"sweep point h={h!r} failed: {cause}")


@dataclass(frozen=True)
class EigenSumQfi:
    """QFI value plus the degenerate-pair exclusion diagnostic."""

    value: float
    excluded: tuple[int, ...] = ()


@dataclass(frozen=True)
class FdQfi:
    value: float
    dh: float


@dataclass(frozen=True)
class QfiCurve:
    """Sampled map h -> F_Q for one probe family."""

    probe: ProbeSpec
    h_grid: np.ndarray
    values: np.ndarray
    method: QfiMethod

    def __post_init__(self):
        if len(self.h_grid) != len(self.values):
            raise ValueError("grid and values must have equal length")
        if np.any(np.diff(self.h_grid) <= 0):
            raise ValueError("h grid must be strictly ascending")
        if np.any(self.values < 0):
            raise ValueError("QFI values must be non-negative")


def qfi_eigen_sum(
    decomp: EigenDecomposition,
    h0_diag: np.ndarray,
    l: int,
    strict: bool = True,
) -> EigenSumQfi:
    """F_Q = 4 sum_{k != l} |<E_k|H_0|E_l>|^2 / (E_k - E_l)^2.

    Pairs closer than the degeneracy tolerance are never summed: in strict
    mode they raise (carrying the multiplet indices), otherwise they are
    skipped and reported in the diagnostic.
    """
    if not 0 <= l < decomp.dim:
        raise IndexError(f"state index {l} out of range for dim {decomp.dim}")
    eps = decomp.degeneracy_tolerance()
    dE = decomp.energies - decomp.energies[l]
    close = np.abs(dE) < eps
    close[l] = False
    if close.any():
        multiplet = (l, *np.nonzero(close)[0])
        if strict:
            raise DegenerateStateError(sorted(multiplet))
        excluded = tuple(int(k) for k in np.nonzero(close)[0])
    else:
        excluded = ()
    elements = decomp.vectors.T @ (np.asarray(h0_diag, dtype=float) * decomp.vectors[:, l])
    keep = ~close
    keep[l] = False
    value = 4.0 * float(np.sum(elements[keep] ** 2 / dE[keep] ** 2))
    return EigenSumQfi(value=value, excluded=excluded)


def _fd_once(
    builder: Callable[[float], np.ndarray],
    h: float,
    dh: float,
    selector: StateSelector | int,
) -> float:
    _, lo = select_state(eigendecompose(builder(h - dh)), selector)
    _, hi = select_state(eigendecompose(builder(h + dh)), selector)
    overlap = abs(float(lo @ hi))
    if overlap < 0.5:
        raise LevelCrossingError(
            f"overlap {overlap:.3f} < 0.5 across [h-dh, h+dh] at h={h!r}; use a smaller dh"
        )
    # rounding can push the overlap a few ulp beyond one; keep F_Q >= 0
    return 2.0 * (1.0 - min(overlap, 1.0)) / dh**2


def qfi_fidelity_fd(
    builder: Callable[[float], np.ndarray],
    h: float,
    selector: StateSelector | int = StateSelector.GROUND,
    dh: float | None = None,
) -> FdQfi:
    """Fidelity-susceptibility estimate F_Q = 2(1 - |<psi(h-dh)|psi(h+dh)>|)/dh^2.

    With dh=None the default step is used and one Richardson step (dh, dh/2)
    removes the leading dh^2 truncation; the pair must agree to
    FD_AGREEMENT_RTOL or the point is rejected.
    """
    if dh is not None:
        if dh <= 0:
            raise ValueError(f"need dh > 0, got {dh}")
        return FdQfi(value=_fd_once(builder, h, dh, selector), dh=dh)
    step = default_fd_step(h)
    coarse = _fd_once(builder, h, step, selector)
    fine = _fd_once(builder, h, step / 2, selector)
    value = (4.0 * fine - coarse) / 3.0
    if abs(coarse - fine) > max(FD_AGREEMENT_RTOL * abs(value), FD_AGREEMENT_ATOL):
        raise FdConsistencyError(
            f"Richardson pair disagrees at h={h!r}: F({step})={coarse!r}, "
            f"F({step/2})={fine!r}"
        )
    return FdQfi(value=value, dh=step)


def _sp_builder(template: ProbeSpec) -> Callable[[float], np.ndarray]:
    return lambda h: build_sp_hamiltonian(template.with_h(h))


def _mb_builder(template: ProbeSpec, basis: SectorBasis) -> Callable[[float], np.ndarray]:
    return lambda h: build_mb_hamiltonian(template.with_h(h), basis)


def qfi_point(
    template: ProbeSpec,
    h: float,
    selector: StateSelector | int,
    method: QfiMethod,
    basis: SectorBasis | None = None,
) -> float:
    """One equilibrium QFI value at the given field."""
    if template.probe_class is ProbeClass.MANY_BODY and basis is None:
        basis = sector_basis(template.L)
    if method is QfiMethod.EIGEN_SUM:
        spec = template.with_h(h)
        if template.probe_class is ProbeClass.SINGLE_PARTICLE:
            H = build_sp_hamiltonian(spec)
            h0 = build_field_generator(spec)
        else:
            H = build_mb_hamiltonian(spec, basis)
            h0 = build_field_generator(spec, basis)
        decomp = eigendecompose(H)
        l, _ = select_state(decomp, selector)
        return qfi_eigen_sum(decomp, h0, l).value
    if method is QfiMethod.FIDELITY_FD:
        if template.probe_class is ProbeClass.SINGLE_PARTICLE:
            builder = _sp_builder(template)
        elif (basis.dim > FULL_DECOMPOSITION_LIMIT
              and selector is StateSelector.GROUND
              and template.profile.kind is ProfileKind.EXPONENTIAL):
            # sectors too large for full decompositions: iterative extremal
            # ground states behind the same finite-difference estimate
            from .experiments import mb_ground_fd_qfi

            return mb_ground_fd_qfi(template.L, template.profile.rate, h)
        else:
            builder = _mb_builder(template, basis)
        return qfi_fidelity_fd(builder, h, selector).value
    raise ValueError(f"method {method} is not an equilibrium method")


def zero_field_qfi(
    template: ProbeSpec,
    selector: StateSelector | int,
    method: QfiMethod = QfiMethod.EIGEN_SUM,
    basis: SectorBasis | None = None,
) -> float:
    """The h -> 0 value: evaluated at h = 0 exactly on the eigen-sum path
    (the limit is regular there) and at h = FD_ZERO_FIELD on the FD path."""
    h = 0.0 if method is QfiMethod.EIGEN_SUM else FD_ZERO_FIELD
    return qfi_point(template, h, selector, method, basis=basis)


def sweep_equilibrium(
    template: ProbeSpec,
    h_grid: np.ndarray,
    selector: StateSelector | int,
    method: QfiMethod,
) -> QfiCurve:
    """One F_Q per grid point; deterministic given inputs."""
    h_grid = np.asarray(h_grid, dtype=float)
    if len(h_grid) == 0:
        raise ValueError("empty field grid")
    if np.any(h_grid <= 0) or np.any(np.diff(h_grid) <= 0):
        raise ValueError("field grid must be positive and strictly ascending")
    basis = sector_basis(template.L) if template.probe_class is ProbeClass.MANY_BODY else None
    values = np.empty(len(h_grid))
    for i, h in enumerate(h_grid):
        try:
            values[i] = qfi_point(template, float(h), selector, method, basis=basis)
        except Exception as err:
            raise SweepPointError(float(h), err) from err
    return QfiCurve(probe=template, h_grid=h_grid, values=values, method=method)


def _parabolic_vertex(x: np.ndarray, y: np.ndarray) -> float:
    """Vertex abscissa of the parabola through three points."""
    d21 = (y[1] - y[0]) / (x[1] - x[0])
    d32 = (y[2] - y[1]) / (x[2] - x[1])
    curv = (d32 - d21) / (x[2] - x[0])
    if curv >= 0:  # no local maximum; fall back to the middle sample
        return float(x[1])
    vertex = 0.5 * (x[0] + x[1] - d21 / curv)
    return float(np.clip(vertex, x[0], x[2]))


def peak_index(values: np.ndarray, peak: str = "global", fallback_interior: bool = False) -> int:
    """Grid index of the curve peak.

    peak="global" is the argmax (ties toward smaller h) and must be interior;
    peak="last-local" takes the largest-h local maximum, which is how the
    shallow dynamical peaks riding on a higher h->0 plateau are located.
    """
    F = np.asarray(values)
    if peak == "global":
        i = int(np.argmax(F))
        if i == 0 or i == len(F) - 1:
            if fallback_interior:
                return int(np.clip(i, 1, len(F) - 2))
            raise BoundaryPeakError(
                f"maximum at grid edge (index {i}); grid must bracket the peak"
            )
        return i
    if peak == "last-local":
        local = [k for k in range(1, len(F) - 1) if F[k] >= F[k - 1] and F[k] > F[k + 1]]
        if local:
            return local[-1]
        if fallback_interior:
            return int(np.clip(np.argmax(F), 1, len(F) - 2))
        raise BoundaryPeakError("no interior local maximum on the grid")
    raise ValueError(f"unknown peak mode {peak!r}")


def refine_peak(h_grid: np.ndarray, values: np.ndarray, i: int) -> float:
    """Parabolic refinement (in log h, log F) around interior grid index i."""
    F = np.asarray(values)
    if np.any(F[i - 1 : i + 2] <= 0):
        return float(h_grid[i])
    x = np.log(np.asarray(h_grid)[i - 1 : i + 2])
    y = np.log(F[i - 1 : i + 2])
    return float(np.exp(_parabolic_vertex(x, y)))


def find_transition(curve: QfiCurve, peak: str = "global") -> float:
    """Refined position of the QFI peak (see peak_index for the modes)."""
    i = peak_index(curve.values, peak)
    return refine_peak(curve.h_grid, curve.values, i)


def fit_localized_decay(
    curve: QfiCurve, h_max: float, window: tuple[float, float]
) -> float:
    """Least-squares slope of log F_Q against log(h - h_max) over the window."""
    h_lo, h_hi = window
    if h_lo <= h_max:
        raise ValueError(f"window must lie strictly above h_max ({h_lo} <= {h_max})")
    keep = (curve.h_grid >= h_lo) & (curve.h_grid <= h_hi)
    if keep.sum() < 5:
        raise ValueError(f"need at least 5 grid points in the window, have {keep.sum()}")
    F = curve.values[keep]
    if np.any(F <= 0):
        raise ValueError("window contains non-positive QFI values")
    fit = scaling.fit_power_law(curve.h_grid[keep] - h_max, F)
    return fit.slope
