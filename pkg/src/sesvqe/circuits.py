"""Circuit representation and the three ansatz families.

Gate vocabulary: X, RY, RZ, H, SDG, CNOT, SWAP, CCX, MCX, A, CPREP, plus an
opaque UNITARY escape hatch for tests.  The A gate is the excitation-preserving
two-qubit rotation A(beta, gamma) built from three CNOTs and four single-qubit
rotations; CPREP is a fan-out of CNOTs from one flag qubit onto listed targets.

CNOT accounting treats CCX and MCX as costed units: CCX = 6 CNOTs, MCX with
k >= 3 controls = (2k - 3) * 6 CNOTs using one clean helper ancilla.  Their
primitive realizations are standard library constructions; simulation applies
them as exact permutations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import statevector as sv
from .encoding import EncodingMap, build_map

_PARAM_COUNTS = {"RY": 1, "RZ": 1, "A": 2}
_FIXED_ARITY = {"X": 1, "RY": 1, "RZ": 1, "H": 1, "SDG": 1, "CNOT": 2, "SWAP": 2, "CCX": 3, "A": 2}

# reversed-direction CNOT: control is the second listed qubit
_CNOT_REV = np.zeros((4, 4), dtype=complex)
for _i in range(4):
    _CNOT_REV[(_i ^ 1) if _i & 2 else _i, _i] = 1.0


@dataclass(frozen=True)
class GateOp:
    """One gate: kind, qubit tuple, optional angles, optional dense matrix.

    Qubit order is semantic: CNOT/CCX/MCX list controls first and the target
    last; CPREP lists the flag first and the fan-out targets after it; the A
    gate lists the pair in chain order.
    """

    kind: str
    qubits: tuple
    params: tuple = ()
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        kind = self.kind
        if kind in _FIXED_ARITY:
            if len(self.qubits) != _FIXED_ARITY[kind]:
                raise ValueError(
                    f"{kind} expects {_FIXED_ARITY[kind]} qubit(s), got {self.qubits}"
                )
        elif kind == "MCX":
            if len(self.qubits) < 2:
                raise ValueError("MCX needs at least one control and a target")
        elif kind == "CPREP":
            if len(self.qubits) < 1:
                raise ValueError("CPREP needs a flag qubit")
        elif kind == "UNITARY":
            if self.matrix is None:
                raise ValueError("UNITARY requires an explicit matrix")
        else:
            raise ValueError(f"unknown gate kind {kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit in {kind} gate: {self.qubits}")
        want = _PARAM_COUNTS.get(kind, 0)
        if kind != "UNITARY" and len(self.params) != want:
            raise ValueError(f"{kind} expects {want} parameter(s), got {self.params}")
        if self.matrix is not None:
            mat = np.asarray(self.matrix, dtype=complex)
            dim = 2 ** len(self.qubits)
            if mat.shape != (dim, dim):
                raise ValueError(f"matrix shape {mat.shape} mismatches qubits {self.qubits}")
            dev = np.max(np.abs(mat.conj().T @ mat - np.eye(dim)))
            if dev > 1e-10:
                raise ValueError(f"custom gate is not unitary (deviation {dev:.3e})")
            object.__setattr__(self, "matrix", mat)

    def cnot_cost(self) -> int:
        kind = self.kind
        if kind in ("X", "RY", "RZ", "H", "SDG"):
            return 0
        if kind == "CNOT":
            return 1
        if kind == "SWAP":
            return 3
        if kind == "CCX":
            return 6
        if kind == "A":
            return 3
        if kind == "CPREP":
            return len(self.qubits) - 1
        if kind == "MCX":
            k = len(self.qubits) - 1
            if k == 1:
                return 1
            if k == 2:
                return 6
            return (2 * k - 3) * 6
        raise ValueError(f"cannot cost opaque gate kind {self.kind!r}")


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over a fixed register width."""

    num_qubits: int
    gates: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise ValueError(
                        f"gate {g.kind} on qubit {q} exceeds width {self.num_qubits}"
                    )

    @property
    def cnot_count(self) -> int:
        return sum(g.cnot_cost() for g in self.gates)

    @property
    def depth(self) -> int:
        frontier = [0] * self.num_qubits
        depth = 0
        for g in self.gates:
            layer = 1 + max((frontier[q] for q in g.qubits), default=0)
            for q in g.qubits:
                frontier[q] = layer
            depth = max(depth, layer)
        return depth


def gate_counts(circuit: Circuit) -> dict:
    """Width, greedy-layered depth and modeled CNOT count of a circuit."""
    return {
        "width": circuit.num_qubits,
        "depth": circuit.depth,
        "cnot_count": circuit.cnot_count,
    }


def a_gate_matrix(beta: float, gamma: float) -> np.ndarray:
    """Dense 4x4 excitation-preserving rotation, first listed qubit = low bit.

    Built as the literal product of its decomposition: CNOT; Rz^dag(gamma+pi)
    and Ry^dag(beta+pi/2) on the first qubit; reversed CNOT; Ry(beta+pi/2) and
    Rz(gamma+pi) on the first qubit; CNOT.
    """
    r = sv.rz(gamma + math.pi) @ sv.ry(beta + math.pi / 2.0)
    r_on_first = np.kron(sv.I2, r)
    rdg_on_first = np.kron(sv.I2, r.conj().T)
    return sv.CNOT @ r_on_first @ _CNOT_REV @ rdg_on_first @ sv.CNOT


def _as_pair_params(params, n_pairs: int) -> np.ndarray:
    arr = np.asarray(params, dtype=float)
    if arr.ndim == 1:
        if arr.size != 2 * n_pairs:
            raise ValueError(
                f"expected {2 * n_pairs} parameters (beta,gamma pairs), got {arr.size}"
            )
        arr = arr.reshape(n_pairs, 2)
    elif arr.shape != (n_pairs, 2):
        raise ValueError(f"expected parameter shape ({n_pairs}, 2), got {arr.shape}")
    return arr


def build_ses_circuit(n_sites: int, params) -> Circuit:
    """One-hot single-excitation ansatz on an N-qubit register.

    X on qubit 0 creates the excitation; a chain of A gates on neighboring
    qubits (j, j+1), j = 0..N-2, then distributes it.  N-1 (beta, gamma)
    pairs.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    pairs = _as_pair_params(params, n_sites - 1)
    gates = [GateOp("X", (0,))]
    for j in range(n_sites - 1):
        gates.append(GateOp("A", (j, j + 1), (pairs[j, 0], pairs[j, 1])))
    return Circuit(n_sites, tuple(gates), "one_hot_ses")


def binary_register_layout(emap: EncodingMap) -> dict:
    """Qubit roles of the packed ansatz register.

    Data bits sit on qubits 0..n-1, the two workspace ancillas above them, and
    one clean helper for the multi-controlled X when the data register has at
    least three qubits.
    """
    n = emap.num_qubits
    layout = {
        "data": tuple(range(n)),
        "flag_a": n,
        "flag_b": n + 1,
        "helper": n + 2 if n >= 3 else None,
    }
    layout["width"] = n + 3 if n >= 3 else n + 2
    return layout


def _prep_and_unflag(gates, emap, layout, site, flag, prev_word):
    """Controlled write of a codeword followed by the matching unflag."""
    word = emap.codeword(site)
    targets = [b for b in range(emap.num_qubits) if (word ^ prev_word) >> b & 1]
    gates.append(GateOp("CPREP", (flag, *targets)))
    frame = [b for b in range(emap.num_qubits) if not (word >> b) & 1]
    for b in frame:
        gates.append(GateOp("X", (b,)))
    gates.append(GateOp("MCX", (*layout["data"], flag)))
    for b in frame:
        gates.append(GateOp("X", (b,)))


def build_binary_ses_circuit(
    n_sites: int,
    params,
    emap: EncodingMap | None = None,
    prep_mode: str = "from_zero",
) -> Circuit:
    """Packed-register equivalent of the one-hot ansatz.

    One module per site: an A gate on the two workspace ancillas splits off
    the amplitude for that site, a SWAP moves the split branch onto the write
    flag, a controlled preparation writes the site's codeword into the data
    register, and a pattern-controlled MCX clears the flag.  The final site
    receives the residual amplitude through a prep/unflag pair without a new
    A gate.  Produces the same site amplitudes as build_ses_circuit with the
    same parameters.

    ``prep_mode`` selects the controlled-prep targets: ``from_zero`` (default)
    flips the bits set in the site codeword, matching the actual flagged-branch
    register content; ``incremental`` flips the bits differing from the
    previous module's codeword and is kept for cross-checks only (it does not
    reproduce the one-hot profile).
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    if prep_mode not in ("from_zero", "incremental"):
        raise ValueError(f"unknown prep_mode {prep_mode!r}")
    emap = emap or build_map(n_sites)
    if emap.n_sites != n_sites:
        raise ValueError(
            f"encoding map covers {emap.n_sites} sites, circuit wants {n_sites}"
        )
    pairs = _as_pair_params(params, n_sites - 1)
    layout = binary_register_layout(emap)
    a0, a1 = layout["flag_a"], layout["flag_b"]
    gates = [GateOp("X", (a0,))]
    prev = 0
    for i in range(n_sites - 1):
        gates.append(GateOp("A", (a0, a1), (pairs[i, 0], pairs[i, 1])))
        gates.append(GateOp("SWAP", (a0, a1)))
        _prep_and_unflag(gates, emap, layout, i, a1, prev)
        if prep_mode == "incremental":
            prev = emap.codeword(i)
    # terminal transfer: the residual branch still carries its flag on a0
    _prep_and_unflag(gates, emap, layout, n_sites - 1, a0, prev)
    return Circuit(layout["width"], tuple(gates), "binary_ses")


def build_hardware_efficient_circuit(num_qubits: int, layers: int, params) -> Circuit:
    """Layered RY/RZ rotations with a CNOT ring entangler.

    Parameters are flat, length 2 * num_qubits * layers, ordered per layer as
    all RY angles (qubit 0..n-1) then all RZ angles.
    """
    if num_qubits < 1 or layers < 0:
        raise ValueError("num_qubits must be >= 1 and layers >= 0")
    arr = np.asarray(params, dtype=float)
    want = 2 * num_qubits * layers
    if arr.shape != (want,):
        raise ValueError(f"expected {want} parameters, got shape {arr.shape}")
    gates = []
    pos = 0
    for _ in range(layers):
        for q in range(num_qubits):
            gates.append(GateOp("RY", (q,), (arr[pos],)))
            pos += 1
        for q in range(num_qubits):
            gates.append(GateOp("RZ", (q,), (arr[pos],)))
            pos += 1
        if num_qubits > 1:
            for q in range(num_qubits):
                gates.append(GateOp("CNOT", (q, (q + 1) % num_qubits)))
    return Circuit(num_qubits, tuple(gates), "hardware_efficient")


def decompose(circuit: Circuit) -> Circuit:
    """Expand A, SWAP and CPREP gates into X/rotation/CNOT primitives.

    CCX and MCX are retained as costed units; their CNOT totals follow the
    documented model rather than an inline synthesis.
    """
    out = []
    for g in circuit.gates:
        if g.kind == "A":
            qa, qb = g.qubits
            beta, gamma = g.params
            out.append(GateOp("CNOT", (qa, qb)))
            out.append(GateOp("RZ", (qa,), (-(gamma + math.pi),)))
            out.append(GateOp("RY", (qa,), (-(beta + math.pi / 2.0),)))
            out.append(GateOp("CNOT", (qb, qa)))
            out.append(GateOp("RY", (qa,), (beta + math.pi / 2.0,)))
            out.append(GateOp("RZ", (qa,), (gamma + math.pi,)))
            out.append(GateOp("CNOT", (qa, qb)))
        elif g.kind == "SWAP":
            qa, qb = g.qubits
            out.append(GateOp("CNOT", (qa, qb)))
            out.append(GateOp("CNOT", (qb, qa)))
            out.append(GateOp("CNOT", (qa, qb)))
        elif g.kind == "CPREP":
            flag = g.qubits[0]
            for t in g.qubits[1:]:
                out.append(GateOp("CNOT", (flag, t)))
        else:
            out.append(g)
    return Circuit(circuit.num_qubits, tuple(out), circuit.label)


def apply_gate_op(state: sv.StateVector, gate: GateOp) -> sv.StateVector:
    kind = gate.kind
    if kind == "X":
        return sv.apply_mcx(state, (), gate.qubits[0])
    if kind == "RY":
        return sv.apply_gate(state, sv.ry(gate.params[0]), gate.qubits)
    if kind == "RZ":
        return sv.apply_gate(state, sv.rz(gate.params[0]), gate.qubits)
    if kind == "H":
        return sv.apply_gate(state, sv.H, gate.qubits)
    if kind == "SDG":
        return sv.apply_gate(state, sv.SDG, gate.qubits)
    if kind in ("CNOT", "CCX", "MCX"):
        return sv.apply_mcx(state, gate.qubits[:-1], gate.qubits[-1])
    if kind == "SWAP":
        return sv.apply_gate(state, sv.SWAP, gate.qubits)
    if kind == "A":
        return sv.apply_gate(state, a_gate_matrix(*gate.params), gate.qubits)
    if kind == "CPREP":
        flag = gate.qubits[0]
        for t in gate.qubits[1:]:
            state = sv.apply_mcx(state, (flag,), t)
        return state
    if kind == "UNITARY":
        return sv.apply_gate(state, gate.matrix, gate.qubits)
    raise ValueError(f"cannot simulate gate kind {kind!r}")


def simulate(circuit: Circuit, initial: sv.StateVector | None = None) -> sv.StateVector:
    """Replay the gate list on the dense simulator from |0...0> by default."""
    state = initial or sv.basis_state(circuit.num_qubits, 0)
    if state.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"initial state width {state.num_qubits} != circuit width {circuit.num_qubits}"
        )
    for g in circuit.gates:
        state = apply_gate_op(state, g)
    return state


def ses_site_amplitudes(n_sites: int, params) -> np.ndarray:
    """Closed-form site amplitudes of the one-hot ansatz.

    The A gate splits the traveling amplitude c as cos(beta)*c staying on the
    current site and exp(-i*gamma)*sin(beta)*c moving on, so the profile is a
    simple cascade.  Verified against dense simulation in the test suite; used
    as the exact-mode fast path at widths where a dense register is wasteful.
    """
    pairs = _as_pair_params(params, n_sites - 1)
    alpha = np.zeros(n_sites, dtype=complex)
    carry = 1.0 + 0.0j
    for j in range(n_sites - 1):
        beta, gamma = pairs[j]
        alpha[j] = math.cos(beta) * carry
        carry = np.exp(-1j * gamma) * math.sin(beta) * carry
    alpha[n_sites - 1] = carry
    return alpha


def onehot_site_amplitudes(state: sv.StateVector):
    """Project a width-N register onto the one-hot sector.

    Returns (amplitudes by site, leaked probability outside the sector).
    """
    n = state.num_qubits
    idx = np.array([1 << j for j in range(n)])
    alpha = state.amplitudes[idx].copy()
    leak = 1.0 - float(np.sum(np.abs(alpha) ** 2))
    return alpha, max(leak, 0.0)


def binary_data_amplitudes(state: sv.StateVector, emap: EncodingMap):
    """Read the data-register block of a packed-ansatz output state.

    Projects every non-data qubit onto 0 and returns (site amplitudes, leaked
    probability outside that block).  The builders guarantee the leak is at
    numerical-noise level.
    """
    layout = binary_register_layout(emap)
    fixed = {q: 0 for q in range(emap.num_qubits, state.num_qubits)}
    sub, weight = sv.extract_subregister(state, layout["data"], fixed)
    alpha = np.array([sub[emap.codeword(k)] for k in range(emap.n_sites)])
    leak = 1.0 - float(np.sum(np.abs(alpha) ** 2))
    return alpha, max(leak, 0.0)


def export_circuit(circuit: Circuit) -> str:
    """Line-oriented text rendering; bit-exact round trip through repr floats."""
    lines = [f"WIDTH {circuit.num_qubits}"]
    if circuit.label:
        lines.append(f"LABEL {circuit.label}")
    for g in circuit.gates:
        if g.kind == "UNITARY":
            raise ValueError("opaque UNITARY gates are not exportable")
        entry = f"GATE {g.kind} {','.join(str(q) for q in g.qubits)}"
        if g.params:
            entry += " " + ",".join(repr(p) for p in g.params)
        lines.append(entry)
    return "\n".join(lines) + "\n"


def import_circuit(text: str) -> Circuit:
    width = None
    label = ""
    gates = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "WIDTH":
            width = int(fields[1])
        elif fields[0] == "LABEL":
            label = " ".join(fields[1:])
        elif fields[0] == "GATE":
            if width is None:
                raise ValueError(f"line {ln}: GATE before WIDTH header")
            if len(fields) < 3:
                raise ValueError(f"line {ln}: malformed gate line {line!r}")
            kind = fields[1]
            qubits = tuple(int(q) for q in fields[2].split(","))
            params = tuple(float(p) for p in fields[3].split(",")) if len(fields) > 3 else ()
            gates.append(GateOp(kind, qubits, params))
        else:
            raise ValueError(f"line {ln}: unknown directive {fields[0]!r}")
    if width is None:
        raise ValueError("missing WIDTH header")
    return Circuit(width, tuple(gates), label)
