import numpy as np
import pytest

from starkqfi import (
    ProbeSpec,
    StateSelector,
    build_mb_hamiltonian,
    build_sp_hamiltonian,
    eigendecompose,
    energy_gap,
    extremal_ground_pair,
    build_mb_hamiltonian_sparse,
    fit_power_law,
    sector_basis,
    select_state,
)
from conftest import random_symmetric


def free_chain_energies(L: int) -> np.ndarray:
    k = np.arange(1, L + 1)
    return np.sort(-2.0 * np.cos(k * np.pi / (L + 1)))


class TestEigendecompose:
    def test_two_site_hopping(self):
        d = eigendecompose(np.array([[0.0, -1.0], [-1.0, 0.0]]))
        assert np.allclose(d.energies, [-1.0, 1.0])

    @pytest.mark.parametrize("L", [10, 50, 150, 300])
    def test_free_chain_closed_form(self, L):
        H = build_sp_hamiltonian(ProbeSpec.single_particle(L, 0.0, 0.1))
        d = eigendecompose(H)
        assert np.allclose(d.energies, free_chain_energies(L), atol=1e-9)

    def test_diagonal_input(self):
        d = eigendecompose(np.diag([3.0, -1.0, 2.0]))
        assert np.allclose(d.energies, [-1.0, 2.0, 3.0])
        expected = np.zeros((3, 3))
        expected[1, 0] = expected[2, 1] = expected[0, 2] = 1.0
        assert np.allclose(d.vectors, expected)

    def test_rejects_non_symmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            eigendecompose(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    @pytest.mark.parametrize("n", [5, 60, 500])
    def test_reconstruction_and_orthonormality(self, rng, n):
        H = random_symmetric(rng, n)
        d = eigendecompose(H)
        scale = np.linalg.norm(H)
        assert np.linalg.norm(H - d.vectors @ np.diag(d.energies) @ d.vectors.T) <= 1e-9 * scale
        gram = d.vectors.T @ d.vectors
        assert np.abs(gram - np.eye(n)).max() <= 1e-10

    def test_residuals(self, rng):
        H = random_symmetric(rng, 120)
        d = eigendecompose(H)
        scale = np.linalg.norm(H)
        for k in (0, 13, 119):
            r = H @ d.vectors[:, k] - d.energies[k] * d.vectors[:, k]
            assert np.linalg.norm(r) <= 1e-10 * scale

    def test_sign_convention(self, rng):
        d = eigendecompose(random_symmetric(rng, 40))
        lead = np.argmax(np.abs(d.vectors), axis=0)
        assert np.all(d.vectors[lead, np.arange(40)] > 0)

    def test_energies_sorted(self, rng):
        d = eigendecompose(random_symmetric(rng, 64))
        assert np.all(np.diff(d.energies) >= 0)


class TestExtremalPair:
    def test_matches_full_decomposition(self):
        spec = ProbeSpec.many_body(10, 0.05, 0.1)
        basis = sector_basis(10)
        dense = eigendecompose(build_mb_hamiltonian(spec, basis))
        E, V = extremal_ground_pair(build_mb_hamiltonian_sparse(spec, basis))
        assert np.allclose(E, dense.energies[:2], atol=1e-9)
        assert abs(abs(V[:, 0] @ dense.vectors[:, 0]) - 1.0) < 1e-9


class TestSelectState:
    def test_ground(self):
        d = eigendecompose(np.array([[0.0, -1.0], [-1.0, 0.0]]))
        k, _ = select_state(d, StateSelector.GROUND)
        assert k == 0

    def test_mid_spectrum_floor_rule(self, rng):
        d = eigendecompose(random_symmetric(rng, 100))
        k, _ = select_state(d, StateSelector.MID_SPECTRUM)
        assert k == 50

    def test_explicit_index(self, rng):
        d = eigendecompose(random_symmetric(rng, 3))
        k, v = select_state(d, 2)
        assert k == 2 and np.allclose(v, d.vectors[:, 2])

    def test_out_of_range(self, rng):
        d = eigendecompose(random_symmetric(rng, 3))
        with pytest.raises(IndexError):
            select_state(d, 3)


class TestEnergyGap:
    def test_two_level(self):
        d = eigendecompose(np.array([[0.0, -1.0], [-1.0, 0.0]]))
        assert energy_gap(d) == pytest.approx(2.0)

    @pytest.mark.parametrize("L", [20, 100, 300])
    def test_free_chain_formula(self, L):
        H = build_sp_hamiltonian(ProbeSpec.single_particle(L, 0.0, 0.1))
        th = np.pi / (L + 1)
        assert energy_gap(eigendecompose(H)) == pytest.approx(
            2 * (np.cos(th) - np.cos(2 * th)), abs=1e-12
        )

    def test_mb_l2(self):
        H = build_mb_hamiltonian(ProbeSpec.many_body(2, 0.0, 0.1), sector_basis(2))
        assert energy_gap(eigendecompose(H)) == pytest.approx(4.0)

    def test_degenerate_flagged(self):
        with pytest.warns(RuntimeWarning, match="degenerate"):
            gap = energy_gap(eigendecompose(np.diag([1.0, 1.0, 2.0])))
        assert gap == 0.0

    def test_gap_power_law_window(self):
        sizes = np.arange(50, 301, 10)
        gaps = []
        for L in sizes:
            H = build_sp_hamiltonian(ProbeSpec.single_particle(int(L), 0.0, 0.05))
            gaps.append(energy_gap(eigendecompose(H)))
        fit = fit_power_law(sizes, gaps)
        assert -2.05 <= fit.slope <= -1.95
