"""Shared oracles: brute-force constructions kept independent of the library paths."""
from __future__ import annotations

import numpy as np
import pytest


def pauli_site_ops(L: int, site: int):
    """sigma^{x,y,z} acting on `site` (1-based) in the full 2^L space.

    Basis index encodes occupations with site 1 as the least-significant
    bit; bit set means spin up, so sigma^z = diag(-1, +1) on a single bit.
    """
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    sz = np.array([[-1.0, 0.0], [0.0, 1.0]])
    out = []
    for op in (sx, sy, sz):
        full = np.kron(np.eye(2 ** (L - site)), np.kron(op, np.eye(2 ** (site - 1))))
        out.append(full)
    return out


def brute_force_mb_full(L: int, a: float, h: float) -> np.ndarray:
    """Explicit 2^L x 2^L tensor-product Hamiltonian (the sector oracle)."""
    dim = 2**L
    H = np.zeros((dim, dim), dtype=complex)
    ops = [pauli_site_ops(L, j) for j in range(1, L + 1)]
    for j in range(L - 1):
        for comp in range(3):
            H -= ops[j][comp] @ ops[j + 1][comp]
    for j in range(L):
        H += h * np.exp(a * (j + 1)) * ops[j][2]
    assert np.allclose(H.imag, 0.0, atol=1e-14)
    return H.real


def project_to_sector(H_full: np.ndarray, states: tuple[int, ...]) -> np.ndarray:
    idx = np.array(states)
    return H_full[np.ix_(idx, idx)]


def random_symmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    A = rng.standard_normal((n, n))
    return (A + A.T) / 2


def adaptive_fd_qfi(builder, h, selector):
    """Fidelity-FD estimate with a step balancing truncation against the
    rounding floor of 1 - |overlap| (which scales like eps / (dh^2 F))."""
    from starkqfi import qfi_fidelity_fd

    pilot = qfi_fidelity_fd(builder, h, selector, dh=1e-3).value
    dh = float(np.clip(np.sqrt(2e-9 / max(pilot, 1e-12)), 3e-5, 1e-3))
    return qfi_fidelity_fd(builder, h, selector, dh=dh).value


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
