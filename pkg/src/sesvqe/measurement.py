"""Few-setting measurement protocols and amplitude-profile reconstruction.

Two protocols estimate the energy of a single-particle state from product
measurements alone:

* ``original`` runs on the one-hot register of N qubits with three settings:
  all-Z (site occupations), all-X (neighbor cosine correlators) and an
  alternating X/Y pattern (neighbor sine correlators).
* ``binary`` runs on a packed n-qubit register with 2n + 1 settings: all-Z
  plus, for each qubit ell, one setting with X (resp. Y) on ell and Z
  elsewhere.  Each X/Y setting resolves every encoded pair whose codewords
  differ exactly at ell.

Every pair estimate is stored in site order (j < k) with value conventions
cos: 2 r_j r_k cos(t_k - t_j) and sin: 2 r_j r_k sin(t_k - t_j).  Relative
phases come from a maximum-weight spanning tree over the measured pairs, so a
state is reconstructed up to one global phase per connected component.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from . import statevector as sv
from .encoding import EncodingMap, hypercube_edges
from .hamiltonian import SiteHamiltonian, energy_from_profile

EXACT_EPSILON = 1e-9


@dataclass(frozen=True)
class MeasurementSetting:
    """One product-measurement context: a basis letter per qubit."""

    label: str
    bases: str
    protocol: str
    axis: int | None = None

    def __post_init__(self):
        bad = set(self.bases) - set("XYZ")
        if bad:
            raise ValueError(f"unknown basis letters {sorted(bad)} in {self.bases!r}")


@dataclass(frozen=True)
class SettingEstimates:
    """Estimates extracted from one setting.

    Keys are ``prob:j``, ``cos:j:k`` or ``sin:j:k`` (site-ordered);
    ``shots_used`` is None in exact mode.
    """

    setting_label: str
    estimates: dict
    shots_used: int | None = None
    extras: dict | None = None


@dataclass(frozen=True)
class AmplitudeProfile:
    """Magnitude/phase description of a site-space state.

    Phases are defined only on sites whose magnitude clears the activity
    threshold; each connected reconstruction component is anchored at phase 0
    on its lowest-index active site.
    """

    n_sites: int
    magnitudes: np.ndarray = field(repr=False)
    phases: np.ndarray = field(repr=False)
    active: np.ndarray = field(repr=False)
    threshold: float
    reference_site: int | None

    def __post_init__(self):
        r = np.asarray(self.magnitudes, dtype=float)
        if np.any(r < 0):
            raise ValueError("magnitudes must be non-negative")
        norm_sq = float(np.sum(r**2))
        if norm_sq > 1.0 + 1e-6:
            raise ValueError(f"profile is super-normalized: sum r^2 = {norm_sq!r}")

    def phase(self, site: int) -> float:
        if not self.active[site]:
            raise ValueError(
                f"phase of site {site} is undefined: magnitude {self.magnitudes[site]!r}"
                f" is below threshold {self.threshold!r}"
            )
        return float(self.phases[site])

    def phase_difference(self, j: int, k: int) -> float:
        return self.phase(k) - self.phase(j)

    def site_amplitudes(self) -> np.ndarray:
        """Complex site vector with zero phase on inactive sites."""
        theta = np.where(self.active, np.nan_to_num(self.phases), 0.0)
        return self.magnitudes * np.exp(1j * theta)

    @staticmethod
    def from_amplitudes(alpha, threshold: float = EXACT_EPSILON) -> "AmplitudeProfile":
        alpha = np.asarray(alpha, dtype=complex)
        r = np.abs(alpha)
        active = r > threshold
        phases = np.where(active, np.angle(alpha), np.nan)
        ref = int(np.argmax(active)) if active.any() else None
        return AmplitudeProfile(alpha.size, r, phases, active, threshold, ref)


@dataclass(frozen=True)
class PhaseGraph:
    """Measured pair-phase relations over the active sites.

    ``edges`` holds ``(j, k, delta, weight)`` with ``delta`` estimating
    ``t_k - t_j`` and ``weight = cos_est^2 + sin_est^2``; ``tree_edges`` is
    the maximum-weight spanning forest actually used for propagation.
    """

    n_sites: int
    edges: tuple
    tree_edges: tuple
    component_of: dict
    n_components: int


def settings_original(n_sites: int) -> list:
    """Three settings for the one-hot register of ``n_sites`` qubits."""
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    alternating = "".join("X" if q % 2 == 0 else "Y" for q in range(n_sites))
    return [
        MeasurementSetting("MZ", "Z" * n_sites, "original"),
        MeasurementSetting("MXX", "X" * n_sites, "original"),
        MeasurementSetting("MXY", alternating, "original"),
    ]


def settings_binary(num_qubits: int) -> list:
    """The 2n + 1 settings for a packed ``num_qubits`` register."""
    if num_qubits < 1:
        raise ValueError("num_qubits must be >= 1")
    out = [MeasurementSetting("BZ", "Z" * num_qubits, "binary")]
    for axis in range(num_qubits):
        for letter in ("X", "Y"):
            bases = "".join(letter if q == axis else "Z" for q in range(num_qubits))
            out.append(MeasurementSetting(f"B{letter}{axis}", bases, "binary", axis))
    return out


def _is_site_vector(source) -> bool:
    return isinstance(source, np.ndarray)


def _hist_mean(hist: sv.ShotHistogram, value_fn) -> float:
    total = 0.0
    for bits, count in hist.counts.items():
        total += count * value_fn(bits)
    return total / hist.total_shots


def _bit(bits: str, qubit: int) -> int:
    # bitstrings are big-endian: leftmost char is the top qubit
    return int(bits[len(bits) - 1 - qubit])


def _check_source(source, setting: MeasurementSetting):
    if isinstance(source, sv.ShotHistogram):
        if source.setting_label != setting.label:
            raise ValueError(
                f"histogram for setting {source.setting_label!r} used with {setting.label!r}"
            )
        width = len(next(iter(source.counts), ""))
        if width and width != len(setting.bases):
            raise ValueError(
                f"histogram width {width} != setting width {len(setting.bases)}"
            )
    elif isinstance(source, sv.StateVector):
        if source.num_qubits != len(setting.bases):
            raise ValueError(
                f"state width {source.num_qubits} != setting width {len(setting.bases)}"
            )


def _estimate_original(source, setting: MeasurementSetting) -> SettingEstimates:
    n = len(setting.bases)
    est = {}
    shots = None
    if _is_site_vector(source):
        alpha = np.asarray(source, dtype=complex)
        if alpha.size != n:
            raise ValueError(f"site vector length {alpha.size} != {n} sites")
        if setting.label == "MZ":
            for j in range(n):
                est[f"prob:{j}"] = float(abs(alpha[j]) ** 2)
        elif setting.label == "MXX":
            for j in range(n - 1):
                est[f"cos:{j}:{j + 1}"] = float(2.0 * (np.conj(alpha[j]) * alpha[j + 1]).real)
        elif setting.label == "MXY":
            for j in range(n - 1):
                est[f"sin:{j}:{j + 1}"] = float(2.0 * (np.conj(alpha[j]) * alpha[j + 1]).imag)
        else:
            raise ValueError(f"unknown original-protocol setting {setting.label!r}")
    elif isinstance(source, sv.StateVector):
        state = source
        if setting.label == "MZ":
            for j in range(n):
                zj = sv.expectation_pauli(state, sv.PauliString.single(n, j, "Z"))
                est[f"prob:{j}"] = (1.0 - zj) / 2.0
        elif setting.label == "MXX":
            for j in range(n - 1):
                est[f"cos:{j}:{j + 1}"] = sv.expectation_pauli(
                    state, sv.PauliString.pair(n, j, "X", j + 1, "X")
                )
        elif setting.label == "MXY":
            # pattern puts X on even qubits; odd-first pairs measure (Y, X)
            # and flip sign relative to the (X, Y)-ordered correlator
            for j in range(n - 1):
                la, lb = setting.bases[j], setting.bases[j + 1]
                raw = sv.expectation_pauli(state, sv.PauliString.pair(n, j, la, j + 1, lb))
                est[f"sin:{j}:{j + 1}"] = raw if la == "X" else -raw
        else:
            raise ValueError(f"unknown original-protocol setting {setting.label!r}")
    elif isinstance(source, sv.ShotHistogram):
        shots = source.total_shots
        if setting.label == "MZ":
            for j in range(n):
                zj = _hist_mean(source, lambda bits, j=j: 1.0 - 2.0 * _bit(bits, j))
                est[f"prob:{j}"] = (1.0 - zj) / 2.0
        elif setting.label == "MXX":
            for j in range(n - 1):
                est[f"cos:{j}:{j + 1}"] = _hist_mean(
                    source,
                    lambda bits, j=j: (1 - 2 * _bit(bits, j)) * (1 - 2 * _bit(bits, j + 1)),
                )
        elif setting.label == "MXY":
            for j in range(n - 1):
                raw = _hist_mean(
                    source,
                    lambda bits, j=j: (1 - 2 * _bit(bits, j)) * (1 - 2 * _bit(bits, j + 1)),
                )
                est[f"sin:{j}:{j + 1}"] = raw if setting.bases[j] == "X" else -raw
        else:
            raise ValueError(f"unknown original-protocol setting {setting.label!r}")
    else:
        raise TypeError(f"unsupported source type {type(source).__name__}")
    return SettingEstimates(setting.label, est, shots)


def _oriented_sin(value: float, emap: EncodingMap, j: int, k: int, axis: int) -> float:
    # raw value estimates 2 r r sin(t_head - t_tail) with the tail holding
    # bit 0 at the flip axis; flip the sign when the tail is the larger site
    if (emap.codeword(j) >> axis) & 1 == 0:
        return value
    return -value


def _estimate_binary(source, setting: MeasurementSetting, emap: EncodingMap) -> SettingEstimates:
    n = emap.num_qubits
    if len(setting.bases) != n:
        raise ValueError(f"setting width {len(setting.bases)} != register width {n}")
    est = {}
    shots = None
    extras = {}
    if _is_site_vector(source):
        alpha = np.asarray(source, dtype=complex)
        if alpha.size != emap.n_sites:
            raise ValueError(f"site vector length {alpha.size} != {emap.n_sites} sites")
        register = np.zeros(2**n, dtype=complex)
        register[list(emap.codewords)] = alpha
        source = sv.StateVector(n, register)
    if isinstance(source, sv.StateVector):
        if setting.label == "BZ":
            p = np.abs(source.amplitudes) ** 2
            for site in range(emap.n_sites):
                est[f"prob:{site}"] = float(p[emap.codeword(site)])
            extras["unencoded_mass"] = float(1.0 - sum(est.values()))
        else:
            axis = setting.axis
            p = sv.measurement_distribution(source, setting.bases)
            for j, k, pos in hypercube_edges(emap):
                if pos != axis:
                    continue
                base0 = emap.codeword(j) & ~(1 << axis)
                base1 = base0 | (1 << axis)
                raw = float(p[base0] - p[base1])
                if setting.label.startswith("BX"):
                    est[f"cos:{j}:{k}"] = raw
                else:
                    est[f"sin:{j}:{k}"] = _oriented_sin(raw, emap, j, k, axis)
    elif isinstance(source, sv.ShotHistogram):
        shots = source.total_shots
        if setting.label == "BZ":
            known = 0
            for site in range(emap.n_sites):
                word = sv.bitstring(emap.codeword(site), n)
                count = source.counts.get(word, 0)
                est[f"prob:{site}"] = count / shots
                known += count
            extras["unknown_codeword_count"] = shots - known
            extras["unencoded_mass"] = (shots - known) / shots
        else:
            axis = setting.axis
            for j, k, pos in hypercube_edges(emap):
                if pos != axis:
                    continue
                base0 = emap.codeword(j) & ~(1 << axis)
                base1 = base0 | (1 << axis)
                c0 = source.counts.get(sv.bitstring(base0, n), 0)
                c1 = source.counts.get(sv.bitstring(base1, n), 0)
                raw = (c0 - c1) / shots
                if setting.label.startswith("BX"):
                    est[f"cos:{j}:{k}"] = raw
                else:
                    est[f"sin:{j}:{k}"] = _oriented_sin(raw, emap, j, k, axis)
    else:
        raise TypeError(f"unsupported source type {type(source).__name__}")
    return SettingEstimates(setting.label, est, shots, extras or None)


def estimate_setting(source, setting: MeasurementSetting, emap: EncodingMap | None = None):
    """Evaluate one measurement setting on an exact state or a shot record.

    ``source`` is a site-amplitude vector (numpy array), a StateVector over
    the register the setting addresses, or a ShotHistogram recorded for this
    setting.  Binary-protocol settings need the encoding map.
    """
    _check_source(source, setting)
    if setting.protocol == "original":
        return _estimate_original(source, setting)
    if setting.protocol == "binary":
        if emap is None:
            raise ValueError("binary-protocol estimation requires an encoding map")
        return _estimate_binary(source, setting, emap)
    raise ValueError(f"unknown protocol {setting.protocol!r}")


def pick_epsilon(shots: int | None) -> float:
    """Default activity threshold: fixed in exact mode, noise-scaled with shots."""
    if shots is None:
        return EXACT_EPSILON
    return max(1e-6, 3.0 / np.sqrt(shots))


def merge_estimates(estimate_list) -> dict:
    merged = {}
    for se in estimate_list:
        for key, value in se.estimates.items():
            if key in merged:
                raise ValueError(f"duplicate estimate key {key!r} across settings")
            merged[key] = (value, se.shots_used)
    return merged


def reconstruct_profile(merged: dict, n_sites: int, epsilon: float | None = None):
    """Turn merged setting estimates into (AmplitudeProfile, PhaseGraph).

    Magnitudes come from the Z-type estimates (negative estimates clamp to
    zero before the square root); relative phases from atan2 of the paired
    sine/cosine estimates, spread from each component's lowest active site
    over a maximum-weight spanning tree.
    """
    probs = np.zeros(n_sites)
    shot_values = [s for _, s in merged.values() if s is not None]
    if epsilon is None:
        epsilon = pick_epsilon(min(shot_values) if shot_values else None)
    for key, (value, _) in merged.items():
        if key.startswith("prob:"):
            site = int(key.split(":")[1])
            if not 0 <= site < n_sites:
                raise ValueError(f"estimate {key!r} out of range for {n_sites} sites")
            probs[site] = value
    magnitudes = np.sqrt(np.clip(probs, 0.0, None))
    active = magnitudes > epsilon

    pair_data = {}
    for key, (value, _) in merged.items():
        if key.startswith("prob:"):
            continue
        kind, j, k = key.split(":")
        j, k = int(j), int(k)
        pair_data.setdefault((j, k), {})[kind] = value
    edges = []
    for (j, k), comps in sorted(pair_data.items()):
        if "cos" not in comps or "sin" not in comps:
            raise ValueError(f"pair ({j},{k}) is missing a cosine or sine estimate")
        if not (active[j] and active[k]):
            continue
        delta = float(np.arctan2(comps["sin"], comps["cos"]))
        weight = float(comps["sin"] ** 2 + comps["cos"] ** 2)
        edges.append((j, k, delta, weight))

    graph = nx.Graph()
    graph.add_nodes_from(int(s) for s in np.flatnonzero(active))
    for j, k, delta, weight in edges:
        graph.add_edge(j, k, delta=delta, weight=weight)
    phases = np.full(n_sites, np.nan)
    tree_edges = []
    component_of = {}
    components = sorted(nx.connected_components(graph), key=min)
    for comp_index, comp in enumerate(components):
        for site in comp:
            component_of[site] = comp_index
        sub = graph.subgraph(comp)
        tree = nx.maximum_spanning_tree(sub, weight="weight")
        root = min(comp)
        phases[root] = 0.0
        for parent, child in nx.bfs_edges(tree, root):
            data = tree.edges[parent, child]
            j, k = (parent, child) if parent < child else (child, parent)
            sign = 1.0 if (parent, child) == (j, k) else -1.0
            phases[child] = phases[parent] + sign * data["delta"]
            tree_edges.append((j, k))

    reference = int(min(component_of)) if component_of else None
    profile = AmplitudeProfile(
        n_sites, magnitudes, phases, active, float(epsilon), reference
    )
    pgraph = PhaseGraph(
        n_sites,
        tuple(edges),
        tuple(sorted(tree_edges)),
        component_of,
        len(components),
    )
    return profile, pgraph


def _settings_for(protocol: str, n_sites: int, emap: EncodingMap | None):
    if protocol == "original":
        return settings_original(n_sites)
    if protocol == "binary":
        if emap is None:
            raise ValueError("binary protocol requires an encoding map")
        return settings_binary(emap.num_qubits)
    raise ValueError(f"unknown protocol {protocol!r}")


def _site_vector_to_register(alpha: np.ndarray, emap: EncodingMap) -> sv.StateVector:
    register = np.zeros(2**emap.num_qubits, dtype=complex)
    register[list(emap.codewords)] = alpha
    return sv.StateVector(emap.num_qubits, register)


def estimate_energy(
    h: SiteHamiltonian,
    source,
    protocol: str,
    shots: int | None = None,
    seed=0,
    emap: EncodingMap | None = None,
    epsilon: float | None = None,
    jobs: int = 1,
):
    """Full protocol run: settings -> estimates -> profile -> energy.

    ``source`` is a site-amplitude vector or a StateVector over the protocol's
    register.  In shot mode each setting is sampled with its own generator
    derived from ``seed`` (an int or tuple of ints), so results do not depend
    on evaluation order.  Returns ``(energy, diagnostics)``.
    """
    settings = _settings_for(protocol, h.n_sites, emap)
    state = source
    if shots is not None:
        if _is_site_vector(source):
            if protocol == "original":
                raise ValueError(
                    "shot mode on the one-hot register needs a StateVector source"
                )
            state = _site_vector_to_register(np.asarray(source, dtype=complex), emap)
        seed_root = list(seed) if isinstance(seed, (tuple, list)) else [seed]

    def run_setting(item):
        idx, setting = item
        if shots is None:
            return estimate_setting(state, setting, emap)
        rng = np.random.default_rng(np.random.SeedSequence(seed_root + [idx]))
        hist = sv.sample_bitstrings(state, setting.bases, shots, rng, setting.label)
        return estimate_setting(hist, setting, emap)

    items = list(enumerate(settings))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_setting, items))
    else:
        results = [run_setting(item) for item in items]

    merged = merge_estimates(results)
    profile, pgraph = reconstruct_profile(merged, h.n_sites, epsilon)
    energy = energy_from_profile(h, profile)

    unresolved = []
    inactive_terms = []
    for j in range(h.n_sites):
        for k in range(j + 1, h.n_sites):
            if h.matrix[j, k] == 0:
                continue
            if not (profile.active[j] and profile.active[k]):
                inactive_terms.append((j, k))
            elif pgraph.component_of.get(j) != pgraph.component_of.get(k):
                unresolved.append((j, k))
    warnings = []
    if unresolved:
        warnings.append("unresolved-phase")
    unencoded = 0.0
    unknown_codewords = 0
    for se in results:
        if se.extras:
            unencoded = max(unencoded, se.extras.get("unencoded_mass", 0.0))
            unknown_codewords += se.extras.get("unknown_codeword_count", 0)
    diagnostics = {
        "protocol": protocol,
        "settings": [s.label for s in settings],
        "shots_per_setting": shots,
        "epsilon": profile.threshold,
        "inactive_sites": [int(s) for s in np.flatnonzero(~profile.active)],
        "n_components": pgraph.n_components,
        "cross_component_terms": unresolved,
        "inactive_terms": inactive_terms,
        "unencoded_mass": unencoded,
        "unknown_codeword_count": unknown_codewords,
        "warnings": warnings,
        "profile": profile_summary(profile),
        "phase_graph": phase_graph_summary(pgraph),
    }
    return energy, diagnostics


def profile_summary(profile: AmplitudeProfile) -> dict:
    """JSON-ready rendering; inactive phases become None."""
    return {
        "n_sites": profile.n_sites,
        "magnitudes": [float(r) for r in profile.magnitudes],
        "phases": [
            float(p) if a else None
            for p, a in zip(profile.phases, profile.active)
        ],
        "active": [bool(a) for a in profile.active],
        "threshold": float(profile.threshold),
        "reference_site": profile.reference_site,
    }


def phase_graph_summary(pgraph: PhaseGraph) -> dict:
    return {
        "edges": [[j, k, float(d), float(w)] for j, k, d, w in pgraph.edges],
        "tree_edges": [list(e) for e in pgraph.tree_edges],
        "n_components": pgraph.n_components,
        "component_of": sorted([int(s), int(c)] for s, c in pgraph.component_of.items()),
    }
