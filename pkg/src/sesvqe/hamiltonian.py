"""Site-space Hamiltonians: validation, spectra, qubit operators, file I/O.

A SiteHamiltonian is an N x N Hermitian matrix over lattice sites.  Two qubit
realizations are supported: the one-hot register of N qubits (through the
Pauli decomposition below) and packed binary registers (see encoding and
measurement modules).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .statevector import PauliString

_HERM_TOL = 1e-12
_SPECTRUM_BUDGET = 4096


@dataclass(frozen=True)
class SiteHamiltonian:
    """Hermitian single-particle Hamiltonian over ``n_sites`` lattice sites."""

    n_sites: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be >= 1, got {self.n_sites}")
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.n_sites, self.n_sites):
            raise ValueError(
                f"matrix shape {mat.shape} does not match n_sites={self.n_sites}"
            )
        dev = np.max(np.abs(mat - mat.conj().T))
        if dev > _HERM_TOL:
            raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e})")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @staticmethod
    def from_matrix(matrix) -> "SiteHamiltonian":
        mat = np.asarray(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {mat.shape}")
        return SiteHamiltonian(mat.shape[0], mat)


@dataclass(frozen=True)
class PauliTermList:
    """Weighted Pauli strings plus an identity offset over a fixed width."""

    num_qubits: int
    terms: tuple
    constant_offset: float

    def dense(self) -> np.ndarray:
        """Full 2^N x 2^N operator; test-scale widths only."""
        dim = 2**self.num_qubits
        mat = self.constant_offset * np.eye(dim, dtype=complex)
        for term in self.terms:
            mat += term.dense()
        return mat


@dataclass(frozen=True)
class PenaltyConfig:
    """Energy ``c_p`` assigned to every non-physical codeword of an n-qubit register."""

    c_p: float
    num_qubits: int

    def __post_init__(self):
        if not self.c_p > 0:
            raise ValueError(f"penalty c_p must be positive, got {self.c_p}")
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")

    @staticmethod
    def default_for(h: "SiteHamiltonian", num_qubits: int) -> "PenaltyConfig":
        """Ten times the spectral range of ``h`` (floored at 1.0).

        The floor keeps the config valid for near-degenerate spectra; for a
        spectrum sitting far above zero this default can land below the ground
        energy, in which case pass an explicit c_p.
        """
        eigs = exact_spectrum(h)
        spread = float(eigs[-1] - eigs[0])
        return PenaltyConfig(max(10.0 * spread, 1.0), num_qubits)


def validate(h: SiteHamiltonian) -> None:
    """Re-check the Hermiticity contract (constructor enforces it too)."""
    dev = np.max(np.abs(h.matrix - h.matrix.conj().T))
    if dev > _HERM_TOL:
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e})")


def pauli_decompose(h: SiteHamiltonian) -> PauliTermList:
    """One-hot register operator equal to ``h`` on the single-excitation sector.

    Diagonal h_kk becomes h_kk (1 - Z_k)/2; a hopping h_jk (j < k) becomes
    Re(h_jk)/2 (X_j X_k + Y_j Y_k) + Im(h_jk)/2 (Y_j X_k - X_j Y_k).
    """
    n = h.n_sites
    terms = []
    offset = 0.0
    for k in range(n):
        val = h.matrix[k, k].real
        if val != 0.0:
            offset += val / 2.0
            terms.append(PauliString.single(n, k, "Z", -val / 2.0))
    for j in range(n):
        for k in range(j + 1, n):
            re = h.matrix[j, k].real
            im = h.matrix[j, k].imag
            if re != 0.0:
                terms.append(PauliString.pair(n, j, "X", k, "X", re / 2.0))
                terms.append(PauliString.pair(n, j, "Y", k, "Y", re / 2.0))
            if im != 0.0:
                terms.append(PauliString.pair(n, j, "Y", k, "X", im / 2.0))
                terms.append(PauliString.pair(n, j, "X", k, "Y", -im / 2.0))
    return PauliTermList(n, tuple(terms), offset)


def extend_with_penalty(h: SiteHamiltonian, penalty: PenaltyConfig) -> SiteHamiltonian:
    """Embed ``h`` as the top-left block of a 2^n-site Hamiltonian.

    The added diagonal sites carry energy ``c_p`` and do not couple to the
    physical block, so for a large enough ``c_p`` the low spectrum is that of
    ``h`` unchanged.
    """
    dim = 2**penalty.num_qubits
    if dim < h.n_sites:
        raise ValueError(
            f"register of {penalty.num_qubits} qubits is smaller than n_sites={h.n_sites}"
        )
    mat = np.zeros((dim, dim), dtype=complex)
    mat[: h.n_sites, : h.n_sites] = h.matrix
    for k in range(h.n_sites, dim):
        mat[k, k] = penalty.c_p
    return SiteHamiltonian(dim, mat)


def exact_spectrum(h: SiteHamiltonian) -> np.ndarray:
    """Ascending eigenvalues by dense Hermitian diagonalization."""
    if h.n_sites > _SPECTRUM_BUDGET:
        raise ValueError(
            f"dense spectrum limited to {_SPECTRUM_BUDGET} sites, got {h.n_sites}"
        )
    return np.linalg.eigvalsh(h.matrix)


def ground_energy(h: SiteHamiltonian) -> float:
    return float(exact_spectrum(h)[0])


def energy_from_profile(h: SiteHamiltonian, profile) -> float:
    """Evaluate the energy functional on a reconstructed amplitude profile.

    E = sum_k h_kk r_k^2
      + sum_{j<k, both active} 2 r_j r_k [Re(h_jk) cos(t_k - t_j)
                                          - Im(h_jk) sin(t_k - t_j)]

    Pairs with an inactive endpoint contribute only through the surviving
    diagonal terms.
    """
    if profile.n_sites != h.n_sites:
        raise ValueError(
            f"profile has {profile.n_sites} sites, Hamiltonian has {h.n_sites}"
        )
    r = np.asarray(profile.magnitudes, dtype=float)
    norm_sq = float(np.sum(r**2))
    if norm_sq > 1.0 + 1e-6:
        raise ValueError(f"profile magnitudes are super-normalized: {norm_sq!r}")
    energy = float(np.sum(np.diag(h.matrix).real * r**2))
    active = np.asarray(profile.active, dtype=bool)
    if np.count_nonzero(active) < 2:
        return energy
    theta = np.where(active, np.nan_to_num(profile.phases), 0.0)
    mask = np.outer(active, active)
    np.fill_diagonal(mask, False)
    delta = theta[None, :] - theta[:, None]  # delta[j, k] = t_k - t_j
    cross = (h.matrix.real * np.cos(delta) - h.matrix.imag * np.sin(delta)) * np.outer(r, r)
    # the summand is symmetric in (j, k); summing over ordered pairs absorbs the 2
    energy += float(np.sum(cross[mask]))
    return energy


def _chain_matrix(n_sites, hopping, onsite):
    mat = np.zeros((n_sites, n_sites), dtype=complex)
    for k in range(n_sites):
        mat[k, k] = onsite[k]
    for k in range(n_sites - 1):
        mat[k, k + 1] = hopping
        mat[k + 1, k] = np.conj(hopping)
    return mat


def chain_instance(
    n_sites: int, hopping: float = 1.0, disorder: float = 0.0, seed: int = 0
) -> SiteHamiltonian:
    """Open tight-binding chain; on-site energies uniform in [-disorder, disorder].

    With zero disorder the exact spectrum is 2*hopping*cos(k*pi/(N+1)),
    k = 1..N.
    """
    rng = np.random.default_rng(seed)
    onsite = rng.uniform(-disorder, disorder, size=n_sites) if disorder else np.zeros(n_sites)
    return SiteHamiltonian(n_sites, _chain_matrix(n_sites, hopping, onsite))


def random_hermitian_instance(
    n_sites: int, scale: float = 1.0, seed: int = 0
) -> SiteHamiltonian:
    """Dense Hermitian draw: (G + G^dagger)/2 with complex Gaussian G."""
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n_sites, n_sites)) + 1j * rng.normal(size=(n_sites, n_sites))
    g *= scale
    return SiteHamiltonian(n_sites, (g + g.conj().T) / 2.0)


def complex_ring_instance(
    n_sites: int, hopping: float = 1.0, seed: int = 0
) -> SiteHamiltonian:
    """Ring with unit-magnitude complex hoppings and random link phases."""
    rng = np.random.default_rng(seed)
    mat = np.zeros((n_sites, n_sites), dtype=complex)
    for k in range(n_sites):
        j = (k + 1) % n_sites
        if j == k:
            continue
        phase = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        val = hopping * phase
        # keep Hermiticity even for the wrap link of a 2-site ring
        mat[k, j] += val
        mat[j, k] += np.conj(val)
    return SiteHamiltonian(n_sites, mat)


FAMILIES = {
    "chain": chain_instance,
    "random_hermitian": random_hermitian_instance,
    "complex_ring": complex_ring_instance,
}

FORMAT_TAG = "sesvqe-hamiltonian/1"


def save_hamiltonian(h: SiteHamiltonian, path, meta: dict | None = None) -> None:
    """Write the upper triangle (diagonal included) as structured text."""
    entries = []
    for j in range(h.n_sites):
        for k in range(j, h.n_sites):
            v = h.matrix[j, k]
            if v != 0:
                entries.append([j, k, float(v.real), float(v.imag)])
    doc = {"format": FORMAT_TAG, "n_sites": h.n_sites, "entries": entries}
    if meta:
        doc["meta"] = meta
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_hamiltonian(path) -> SiteHamiltonian:
    """Read a Hamiltonian file, mirroring entries Hermitianly.

    Entries must satisfy row <= col; diagonal entries must be real.
    """
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT_TAG:
        raise ValueError(f"unrecognized Hamiltonian format tag {doc.get('format')!r}")
    n = int(doc["n_sites"])
    if n < 1:
        raise ValueError("n_sites must be >= 1")
    mat = np.zeros((n, n), dtype=complex)
    seen = set()
    for row, col, re, im in doc["entries"]:
        row, col = int(row), int(col)
        if not (0 <= row < n and 0 <= col < n):
            raise ValueError(f"entry ({row},{col}) out of range for n_sites={n}")
        if row > col:
            raise ValueError(f"entry ({row},{col}) is below the diagonal")
        if (row, col) in seen:
            raise ValueError(f"duplicate entry ({row},{col})")
        seen.add((row, col))
        val = complex(re, im)
        if row == col:
            if abs(val.imag) > _HERM_TOL:
                raise ValueError(f"diagonal entry ({row},{row}) has imaginary part {im}")
            mat[row, row] = val.real
        else:
            mat[row, col] = val
            mat[col, row] = np.conj(val)
    return SiteHamiltonian(n, mat)
