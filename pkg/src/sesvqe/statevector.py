"""Dense statevector simulation with a little-endian qubit convention.

Basis state ``|i>`` assigns qubit ``k`` the bit ``(i >> k) & 1``, so qubit 0 is
the least significant bit of the amplitude index.  All exported operations
treat states as immutable and return fresh arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_NORM_TOL = 1e-10
_HERM_IM_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
SDG = np.array([[1, 0], [0, -1j]], dtype=complex)

# Basis-change operator for measuring Y: apply S-dagger, then Hadamard.  Maps
# the +1 eigenstate (|0> + i|1>)/sqrt(2) to |0>.
Y_BASIS_CHANGE = H @ SDG

_PAULI_1Q = {"I": I2, "X": X, "Y": Y, "Z": Z}


def ry(theta: float) -> np.ndarray:
    """Rotation exp(-i*theta*Y/2)."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    """Rotation exp(-i*theta*Z/2)."""
    return np.array(
        [[np.exp(-1j * theta / 2.0), 0], [0, np.exp(1j * theta / 2.0)]], dtype=complex
    )


def _permutation_matrix(num_qubits: int, fn) -> np.ndarray:
    dim = 2**num_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        mat[fn(col), col] = 1.0
    return mat


# Two-qubit matrices follow the gate-index convention used by apply_gate: the
# first listed qubit is the least significant bit of the 4x4 index.
CNOT = _permutation_matrix(2, lambda i: i ^ 2 if i & 1 else i)
SWAP = _permutation_matrix(2, lambda i: ((i & 1) << 1) | ((i >> 1) & 1))
CCX = _permutation_matrix(3, lambda i: i ^ 4 if (i & 3) == 3 else i)


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state over ``num_qubits`` little-endian qubits."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if self.num_qubits < 1:
            raise ValueError(f"num_qubits must be >= 1, got {self.num_qubits}")
        if amps.shape != (2**self.num_qubits,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, expected"
                f" ({2 ** self.num_qubits},) for {self.num_qubits} qubits"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state is not normalized: sum |amp|^2 = {norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 2**self.num_qubits


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis with a real coefficient.

    ``ops[k]`` is the letter (I, X, Y or Z) acting on qubit ``k``.
    """

    ops: str
    coefficient: float = 1.0

    def __post_init__(self):
        bad = set(self.ops) - set("IXYZ")
        if bad:
            raise ValueError(f"unknown Pauli letters {sorted(bad)} in {self.ops!r}")

    @property
    def num_qubits(self) -> int:
        return len(self.ops)

    @staticmethod
    def single(num_qubits: int, qubit: int, letter: str, coeff: float = 1.0) -> "PauliString":
        ops = ["I"] * num_qubits
        ops[qubit] = letter
        return PauliString("".join(ops), coeff)

    @staticmethod
    def pair(
        num_qubits: int, qa: int, la: str, qb: int, lb: str, coeff: float = 1.0
    ) -> "PauliString":
        ops = ["I"] * num_qubits
        ops[qa] = la
        ops[qb] = lb
        return PauliString("".join(ops), coeff)

    def dense(self) -> np.ndarray:
        """Kronecker expansion (most significant qubit first); test-scale only."""
        if self.num_qubits > 12:
            raise ValueError("dense Pauli expansion is limited to 12 qubits")
        mat = np.array([[self.coefficient]], dtype=complex)
        for q in reversed(range(self.num_qubits)):
            mat = np.kron(mat, _PAULI_1Q[self.ops[q]])
        return mat


@dataclass(frozen=True)
class ShotHistogram:
    """Measurement record for one setting: big-endian bitstring -> count."""

    setting_label: str
    counts: dict
    total_shots: int

    def __post_init__(self):
        if self.total_shots <= 0:
            raise ValueError("total_shots must be positive")
        if sum(self.counts.values()) != self.total_shots:
            raise ValueError("histogram counts do not sum to total_shots")
        for key in self.counts:
            if set(key) - {"0", "1"}:
                raise ValueError(f"malformed bitstring key {key!r}")


def basis_state(num_qubits: int, index: int) -> StateVector:
    if not 0 <= index < 2**num_qubits:
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def from_amplitudes(amplitudes: np.ndarray) -> StateVector:
    amps = np.asarray(amplitudes, dtype=complex)
    n = int(round(np.log2(amps.size)))
    if 2**n != amps.size:
        raise ValueError(f"amplitude count {amps.size} is not a power of two")
    return StateVector(n, amps)


def _check_qubits(qubits, num_qubits: int) -> None:
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit in {qubits}")
    for q in qubits:
        if not 0 <= q < num_qubits:
            raise ValueError(f"qubit {q} out of range for {num_qubits}-qubit state")


def _apply_matrix(
    amps: np.ndarray, matrix: np.ndarray, qubits, num_qubits: int
) -> np.ndarray:
    """Apply a 2^m x 2^m matrix to the listed qubits of a flat amplitude array.

    The first listed qubit indexes the least significant bit of the matrix.
    """
    m = len(qubits)
    tensor = amps.reshape([2] * num_qubits)
    # numpy axis a of the reshaped tensor corresponds to qubit (n-1-a); the
    # transpose puts the most significant gate qubit first.
    axes = [num_qubits - 1 - q for q in reversed(qubits)]
    rest = [a for a in range(num_qubits) if a not in axes]
    perm = axes + rest
    moved = tensor.transpose(perm).reshape(2**m, -1)
    out = (matrix @ moved).reshape([2] * num_qubits)
    return out.transpose(np.argsort(perm)).reshape(-1)


def apply_gate(state: StateVector, matrix: np.ndarray, qubits) -> StateVector:
    """Apply a dense unitary to the listed qubits, returning a new state.

    Unitarity is checked to 1e-10.
    """
    matrix = np.asarray(matrix, dtype=complex)
    m = len(qubits)
    if matrix.shape != (2**m, 2**m):
        raise ValueError(
            f"matrix shape {matrix.shape} does not match {m} target qubit(s)"
        )
    _check_qubits(qubits, state.num_qubits)
    err = np.max(np.abs(matrix.conj().T @ matrix - np.eye(2**m)))
    if err > 1e-10:
        raise ValueError(f"gate matrix is not unitary (deviation {err:.3e})")
    return StateVector(
        state.num_qubits, _apply_matrix(state.amplitudes, matrix, qubits, state.num_qubits)
    )


def apply_mcx(state: StateVector, controls, target: int) -> StateVector:
    """Multi-controlled X as an explicit permutation of amplitudes."""
    _check_qubits(list(controls) + [target], state.num_qubits)
    idx = np.arange(state.dim)
    mask = np.ones(state.dim, dtype=bool)
    for c in controls:
        mask &= ((idx >> c) & 1) == 1
    mask &= ((idx >> target) & 1) == 0
    src = idx[mask]
    dst = src ^ (1 << target)
    out = state.amplitudes.copy()
    out[src], out[dst] = state.amplitudes[dst], state.amplitudes[src]
    return StateVector(state.num_qubits, out)


def pauli_apply(state: StateVector, pauli: PauliString) -> np.ndarray:
    """Return the amplitude array of ``P |state>`` (not necessarily normalized)."""
    if pauli.num_qubits != state.num_qubits:
        raise ValueError(
            f"Pauli width {pauli.num_qubits} != state width {state.num_qubits}"
        )
    flip = 0
    for q, s in enumerate(pauli.ops):
        if s in "XY":
            flip |= 1 << q
    idx = np.arange(state.dim)
    src = idx ^ flip
    phase = np.full(state.dim, pauli.coefficient, dtype=complex)
    for q, s in enumerate(pauli.ops):
        bit = (src >> q) & 1
        if s == "Y":
            phase = phase * np.where(bit == 1, -1j, 1j)
        elif s == "Z":
            phase = phase * np.where(bit == 1, -1.0, 1.0)
    return phase * state.amplitudes[src]


def expectation_pauli(state: StateVector, pauli: PauliString) -> float:
    """Exact <state| P |state> for a Hermitian Pauli string (real coefficient)."""
    value = np.vdot(state.amplitudes, pauli_apply(state, pauli))
    if abs(value.imag) > _HERM_IM_TOL:
        raise ValueError(
            f"expectation of Hermitian Pauli came out complex ({value!r});"
            " this indicates an internal error"
        )
    return float(value.real)


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b>."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"width mismatch: {a.num_qubits} vs {b.num_qubits}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def rotate_to_measurement_basis(state: StateVector, bases: str) -> StateVector:
    """Apply per-qubit basis changes so a Z measurement realizes ``bases``.

    ``bases[k]`` is Z, X or Y for qubit ``k``.
    """
    if len(bases) != state.num_qubits:
        raise ValueError(
            f"basis string length {len(bases)} != state width {state.num_qubits}"
        )
    amps = state.amplitudes
    for q, b in enumerate(bases):
        if b == "Z":
            continue
        if b == "X":
            amps = _apply_matrix(amps, H, [q], state.num_qubits)
        elif b == "Y":
            amps = _apply_matrix(amps, Y_BASIS_CHANGE, [q], state.num_qubits)
        else:
            raise ValueError(f"unknown measurement basis {b!r} for qubit {q}")
    return StateVector(state.num_qubits, amps)


def measurement_distribution(state: StateVector, bases: str) -> np.ndarray:
    """Exact outcome probabilities of measuring every qubit in ``bases``."""
    rotated = rotate_to_measurement_basis(state, bases)
    p = np.abs(rotated.amplitudes) ** 2
    return p / p.sum()


def bitstring(index: int, num_qubits: int) -> str:
    """Big-endian rendering; leftmost character is qubit ``num_qubits - 1``."""
    return format(index, f"0{num_qubits}b")


def bitstring_index(bits: str) -> int:
    return int(bits, 2)


def sample_bitstrings(
    state: StateVector, bases: str, shots: int, seed, label: str = ""
) -> ShotHistogram:
    """Sample ``shots`` outcomes of a product measurement.

    ``seed`` is an integer or a ``numpy.random.Generator``; identical seeds
    reproduce identical histograms.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    p = measurement_distribution(state, bases)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    draws = rng.multinomial(shots, p)
    counts = {
        bitstring(i, state.num_qubits): int(c) for i, c in enumerate(draws) if c > 0
    }
    return ShotHistogram(label or bases, counts, shots)


def extract_subregister(state: StateVector, keep_qubits, fixed: dict):
    """Project ``fixed`` qubits onto given bits and keep the remaining register.

    Returns ``(sub_amplitudes, weight)`` where ``weight`` is the probability
    mass on the projected block and ``sub_amplitudes`` is the unnormalized
    amplitude vector over ``keep_qubits`` (listed qubit order = little-endian
    order of the sub-register).
    """
    _check_qubits(list(keep_qubits) + list(fixed), state.num_qubits)
    if set(keep_qubits) | set(fixed) != set(range(state.num_qubits)):
        raise ValueError("keep_qubits and fixed must partition the register")
    idx = np.arange(state.dim)
    mask = np.ones(state.dim, dtype=bool)
    for q, bit in fixed.items():
        mask &= ((idx >> q) & 1) == bit
    block = idx[mask]
    # order block indices by the little-endian value of the kept qubits
    sub_value = np.zeros(block.size, dtype=np.int64)
    for pos, q in enumerate(keep_qubits):
        sub_value |= ((block >> q) & 1) << pos
    sub = np.zeros(2 ** len(keep_qubits), dtype=complex)
    sub[sub_value] = state.amplitudes[block]
    weight = float(np.sum(np.abs(sub) ** 2))
    return sub, weight
