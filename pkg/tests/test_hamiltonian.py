"""Site Hamiltonians: decomposition, penalty extension, energy functional, I/O."""

import json

import numpy as np
import pytest

from sesvqe import hamiltonian as ham
from sesvqe.measurement import AmplitudeProfile
from sesvqe.statevector import PauliString

I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_from_terms(term_list: ham.PauliTermList) -> np.ndarray:
    """Oracle: rebuild the register operator with a plain kron loop."""
    dim = 2**term_list.num_qubits
    mat = term_list.constant_offset * np.eye(dim, dtype=complex)
    for term in term_list.terms:
        factor = np.array([[1.0]], dtype=complex)
        for q in reversed(range(term_list.num_qubits)):
            factor = np.kron(factor, PAULI[term.ops[q]])
        mat += term.coefficient * factor
    return mat


def test_hermiticity_enforced():
    with pytest.raises(ValueError, match="Hermitian"):
        ham.SiteHamiltonian(2, np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError, match="shape"):
        ham.SiteHamiltonian(3, np.zeros((2, 2)))
    h = ham.SiteHamiltonian.from_matrix([[1.0, 2j], [-2j, 0.5]])
    ham.validate(h)


def test_matrix_is_read_only():
    h = ham.chain_instance(3)
    with pytest.raises(ValueError):
        h.matrix[0, 0] = 5.0


class TestPauliDecompose:
    def test_two_site_hopping(self):
        t = 0.7
        h = ham.SiteHamiltonian.from_matrix([[0, t], [t, 0]])
        out = ham.pauli_decompose(h)
        assert out.constant_offset == 0.0
        got = {term.ops: term.coefficient for term in out.terms}
        assert got == {"XX": pytest.approx(t / 2), "YY": pytest.approx(t / 2)}

    def test_single_site(self):
        eps = -1.3
        out = ham.pauli_decompose(ham.SiteHamiltonian.from_matrix([[eps]]))
        assert out.constant_offset == pytest.approx(eps / 2)
        assert len(out.terms) == 1
        assert out.terms[0].ops == "Z"
        assert out.terms[0].coefficient == pytest.approx(-eps / 2)

    def test_imaginary_hopping_terms(self):
        h = ham.SiteHamiltonian.from_matrix([[0, 1j], [-1j, 0]])
        got = {term.ops: term.coefficient for term in ham.pauli_decompose(h).terms}
        assert got == {"XY": pytest.approx(-0.5), "YX": pytest.approx(0.5)}

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_register_operator_restricts_to_h(self, seed):
        # project the dense register operator onto the three single-bit states
        h = ham.random_hermitian_instance(3, seed=seed)
        dense = dense_from_terms(ham.pauli_decompose(h))
        idx = [1 << k for k in range(3)]
        block = dense[np.ix_(idx, idx)]
        np.testing.assert_allclose(block, h.matrix, atol=1e-12)

    def test_dense_matches_oracle(self):
        h = ham.random_hermitian_instance(4, seed=9)
        out = ham.pauli_decompose(h)
        np.testing.assert_allclose(out.dense(), dense_from_terms(out), atol=1e-12)

    def test_vacuum_state_has_zero_energy(self):
        h = ham.random_hermitian_instance(3, seed=5)
        dense = dense_from_terms(ham.pauli_decompose(h))
        assert abs(dense[0, 0]) < 1e-12


class TestPenaltyExtension:
    def test_padding_diagonal(self):
        h = ham.chain_instance(3)
        ext = ham.extend_with_penalty(h, ham.PenaltyConfig(100.0, 2))
        assert ext.n_sites == 4
        np.testing.assert_allclose(ext.matrix[:3, :3], h.matrix, atol=1e-15)
        assert ext.matrix[3, 3] == pytest.approx(100.0)
        assert np.max(np.abs(ext.matrix[3, :3])) == 0.0

    def test_ground_energy_preserved(self):
        h = ham.random_hermitian_instance(6, seed=2)
        pen = ham.PenaltyConfig.default_for(h, 3)
        ext = ham.extend_with_penalty(h, pen)
        assert ham.ground_energy(ext) == pytest.approx(ham.ground_energy(h), abs=1e-10)

    def test_register_too_small(self):
        h = ham.chain_instance(5)
        with pytest.raises(ValueError, match="smaller"):
            ham.extend_with_penalty(h, ham.PenaltyConfig(10.0, 2))

    def test_penalty_validation(self):
        with pytest.raises(ValueError, match="positive"):
            ham.PenaltyConfig(0.0, 2)
        with pytest.raises(ValueError, match="positive"):
            ham.PenaltyConfig(-3.0, 2)
        with pytest.raises(ValueError):
            ham.PenaltyConfig(1.0, 0)

    def test_default_penalty_value(self):
        h = ham.SiteHamiltonian.from_matrix([[0, 1], [1, 0]])
        pen = ham.PenaltyConfig.default_for(h, 1)
        assert pen.c_p == pytest.approx(20.0)
        tiny = ham.SiteHamiltonian.from_matrix([[0.01, 0], [0, 0.02]])
        assert ham.PenaltyConfig.default_for(tiny, 1).c_p == pytest.approx(1.0)


class TestSpectrum:
    def test_symmetric_hopping_pair(self):
        h = ham.SiteHamiltonian.from_matrix([[0, 1], [1, 0]])
        np.testing.assert_allclose(ham.exact_spectrum(h), [-1.0, 1.0], atol=1e-14)
        assert ham.ground_energy(h) == pytest.approx(-1.0)

    def test_four_site_chain_closed_form(self):
        h = ham.chain_instance(4, hopping=1.0)
        want = sorted(2.0 * np.cos(k * np.pi / 5.0) for k in range(1, 5))
        np.testing.assert_allclose(ham.exact_spectrum(h), want, atol=1e-12)
        # golden-ratio pair
        np.testing.assert_allclose(
            ham.exact_spectrum(h),
            [-1.618033988749895, -0.6180339887498949, 0.6180339887498949, 1.618033988749895],
            atol=1e-12,
        )

    def test_single_site(self):
        h = ham.SiteHamiltonian.from_matrix([[0.25]])
        np.testing.assert_allclose(ham.exact_spectrum(h), [0.25])

    def test_permutation_invariance(self):
        h = ham.random_hermitian_instance(5, seed=3)
        perm = np.random.default_rng(0).permutation(5)
        p = np.eye(5)[perm]
        h2 = ham.SiteHamiltonian(5, p @ h.matrix @ p.T)
        np.testing.assert_allclose(ham.exact_spectrum(h2), ham.exact_spectrum(h), atol=1e-12)

    def test_budget_guard(self):
        big = ham.SiteHamiltonian(5000, np.zeros((5000, 5000)))
        with pytest.raises(ValueError, match="dense spectrum"):
            ham.exact_spectrum(big)


def profile_of(alpha) -> AmplitudeProfile:
    return AmplitudeProfile.from_amplitudes(np.asarray(alpha, dtype=complex))


class TestEnergyFromProfile:
    def test_single_site(self):
        h = ham.SiteHamiltonian.from_matrix([[2.5]])
        assert ham.energy_from_profile(h, profile_of([1.0])) == pytest.approx(2.5)

    def test_antisymmetric_pair(self):
        t = 0.9
        h = ham.SiteHamiltonian.from_matrix([[0, t], [t, 0]])
        alpha = np.array([1.0, -1.0]) / np.sqrt(2.0)
        assert ham.energy_from_profile(h, profile_of(alpha)) == pytest.approx(-t, abs=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_matches_quadratic_form(self, seed):
        rng = np.random.default_rng(seed)
        h = ham.random_hermitian_instance(5, seed=seed + 40)
        alpha = rng.normal(size=5) + 1j * rng.normal(size=5)
        alpha /= np.linalg.norm(alpha)
        want = np.vdot(alpha, h.matrix @ alpha).real
        got = ham.energy_from_profile(h, profile_of(alpha))
        assert got == pytest.approx(want, abs=1e-12)

    def test_inactive_sites_drop_their_couplings(self):
        h = ham.random_hermitian_instance(4, seed=7)
        alpha = np.array([0.0, 0.8, 0.6, 0.0], dtype=complex)
        got = ham.energy_from_profile(h, profile_of(alpha))
        want = np.vdot(alpha, h.matrix @ alpha).real
        assert got == pytest.approx(want, abs=1e-12)

    def test_all_but_one_inactive(self):
        h = ham.random_hermitian_instance(3, seed=8)
        got = ham.energy_from_profile(h, profile_of([0.0, 1.0, 0.0]))
        assert got == pytest.approx(h.matrix[1, 1].real, abs=1e-12)

    def test_super_normalized_rejected(self):
        with pytest.raises(ValueError, match="super-normalized"):
            AmplitudeProfile(
                2,
                np.array([1.0, 1.0]),
                np.zeros(2),
                np.array([True, True]),
                1e-9,
                0,
            )

    def test_size_mismatch(self):
        h = ham.chain_instance(3)
        with pytest.raises(ValueError, match="sites"):
            ham.energy_from_profile(h, profile_of([1.0, 0.0]))


class TestInstances:
    def test_chain_structure(self):
        h = ham.chain_instance(5, hopping=0.5)
        mat = h.matrix
        assert np.all(np.diag(mat) == 0)
        for k in range(4):
            assert mat[k, k + 1] == pytest.approx(0.5)
        assert mat[0, 2] == 0

    def test_chain_disorder_bounds_and_determinism(self):
        a = ham.chain_instance(50, 1.0, disorder=2.0, seed=11)
        b = ham.chain_instance(50, 1.0, disorder=2.0, seed=11)
        np.testing.assert_array_equal(a.matrix, b.matrix)
        onsite = np.diag(a.matrix).real
        assert np.max(np.abs(onsite)) <= 2.0
        assert np.std(onsite) > 0.1
        c = ham.chain_instance(50, 1.0, disorder=2.0, seed=12)
        assert not np.array_equal(c.matrix, a.matrix)

    def test_random_hermitian(self):
        h = ham.random_hermitian_instance(6, seed=0)
        ham.validate(h)
        assert not np.allclose(h.matrix.imag, 0.0)

    def test_complex_ring(self):
        h = ham.complex_ring_instance(5, seed=4)
        ham.validate(h)
        mat = h.matrix
        for k in range(5):
            j = (k + 1) % 5
            assert abs(mat[k, j]) == pytest.approx(1.0)
        assert mat[0, 2] == 0

    def test_two_site_ring_keeps_hermiticity(self):
        h = ham.complex_ring_instance(2, seed=1)
        ham.validate(h)

    def test_family_registry(self):
        assert set(ham.FAMILIES) == {"chain", "random_hermitian", "complex_ring"}


class TestSaveLoad:
    def test_round_trip(self, tmp_path):
        for n in (1, 3, 6):
            h = ham.random_hermitian_instance(n, seed=n)
            path = tmp_path / f"h{n}.json"
            ham.save_hamiltonian(h, path, meta={"family": "random_hermitian"})
            back = ham.load_hamiltonian(path)
            assert back.n_sites == n
            np.testing.assert_allclose(back.matrix, h.matrix, atol=1e-15)

    def test_file_shape(self, tmp_path):
        h = ham.SiteHamiltonian.from_matrix([[1.0, 2 - 1j], [2 + 1j, 0.0]])
        path = tmp_path / "h.json"
        ham.save_hamiltonian(h, path)
        data = json.loads(path.read_text())
        assert data["format"] == "sesvqe-hamiltonian/1"
        assert data["n_sites"] == 2
        # upper triangle only, zeros skipped; entries are [row, col, re, im]
        cells = {(row, col) for row, col, _, _ in data["entries"]}
        assert cells == {(0, 0), (0, 1)}

    def test_load_rejects_bad_tag(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"format": "other/9", "n_sites": 1, "entries": []}))
        with pytest.raises(ValueError, match="format"):
            ham.load_hamiltonian(path)

    def test_load_rejects_lower_triangle(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "format": "sesvqe-hamiltonian/1",
                    "n_sites": 2,
                    "entries": [[1, 0, 1.0, 0.0]],
                }
            )
        )
        with pytest.raises(ValueError, match="below the diagonal"):
            ham.load_hamiltonian(path)

    def test_load_rejects_duplicate_entries(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "format": "sesvqe-hamiltonian/1",
                    "n_sites": 2,
                    "entries": [[0, 1, 1.0, 0.0], [0, 1, 2.0, 0.0]],
                }
            )
        )
        with pytest.raises(ValueError, match="duplicate"):
            ham.load_hamiltonian(path)

    def test_load_rejects_complex_diagonal(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "format": "sesvqe-hamiltonian/1",
                    "n_sites": 1,
                    "entries": [[0, 0, 1.0, 0.5]],
                }
            )
        )
        with pytest.raises(ValueError, match="diagonal"):
            ham.load_hamiltonian(path)

    def test_load_rejects_out_of_range_entry(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "format": "sesvqe-hamiltonian/1",
                    "n_sites": 2,
                    "entries": [[0, 2, 1.0, 0.0]],
                }
            )
        )
        with pytest.raises(ValueError, match="out of range"):
            ham.load_hamiltonian(path)


def test_pauli_term_list_dense_width_guard():
    term = PauliString.single(13, 0, "Z", 1.0)
    big = ham.PauliTermList(13, (term,), 0.0)
    with pytest.raises(ValueError):
        big.dense()
