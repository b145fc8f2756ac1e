"""Log-space regressions turning sweep outputs into scaling exponents."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    n_points: int


def _ols(x: np.ndarray, y: np.ndarray) -> FitResult:
    if len(x) < 3:
        raise ValueError(f"need at least 3 points, got {len(x)}")
    if len(x) != len(y):
        raise ValueError("x and y must have equal length")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise ValueError("degenerate abscissa (all x equal)")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    ss_res = float(np.sum((y - slope * x - intercept) ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    # constant data: residuals are pure rounding noise, the fit is exact
    floor = len(y) * (8.0 * np.finfo(float).eps * max(1.0, abs(ym))) ** 2
    r2 = 1.0 if ss_tot <= floor else 1.0 - ss_res / ss_tot
    return FitResult(
        slope=slope,
        intercept=intercept,
        r_squared=r2,
        window=(float(x.min()), float(x.max())),
        n_points=len(x),
    )


def fit_exponential_in_L(sizes, values) -> FitResult:
    """OLS of ln F against L; the slope is the exponential rate beta."""
    L = np.asarray(sizes, dtype=float)
    F = np.asarray(values, dtype=float)
    if np.any(F <= 0):
        raise ValueError("exponential fit needs positive values")
    return _ols(L, np.log(F))


def fit_power_law(x, y) -> FitResult:
    """OLS of ln y against ln x; the slope is the power-law exponent."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs positive inputs")
    return _ols(np.log(x), np.log(y))


def meta_fit_linear_in_a(rates, betas) -> FitResult:
    """Linear fit beta = c1 * a + c0 across gradient rates."""
    return _ols(np.asarray(rates, dtype=float), np.asarray(betas, dtype=float))


def fit_hmax_scaling(sizes, h_max_values) -> FitResult:
    """OLS of ln h_max against L; the slope is the decay rate a'."""
    L = np.asarray(sizes, dtype=float)
    hm = np.asarray(h_max_values, dtype=float)
    if np.any(hm <= 0):
        raise ValueError("h_max values must be positive")
    return _ols(L, np.log(hm))


def rescaled_fom(qfi: float, gap: float) -> float:
    """F_Q per unit preparation time, tau ~ 1/gap: returns F_Q * gap."""
    if gap <= 0:
        raise ValueError(f"need a positive gap, got {gap}")
    return qfi * gap


def precision_bound(qfi: float, repetitions: int = 1) -> float:
    """Cramer-Rao limit on the standard deviation: 1/sqrt(M * F_Q)."""
    if qfi <= 0:
        raise ValueError(f"need F_Q > 0, got {qfi}")
    if repetitions < 1:
        raise ValueError(f"need M >= 1, got {repetitions}")
    return 1.0 / np.sqrt(repetitions * qfi)
