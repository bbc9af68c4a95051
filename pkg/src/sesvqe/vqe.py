"""Variational ground-state search over the single-particle ansatz family.

The driver couples three ansatz builders (one-hot chain, packed binary
register, hardware-efficient layers with a penalty-extended target) to three
cost evaluation routes (exact operator average, exact protocol estimates,
finite-shot protocol estimates) behind one derivative-free optimization loop.

Determinism contract: every random draw descends from the run seed through
numpy SeedSequence spawn keys, namely [seed, 0, restart] for simplex starting
points and in-restart kick directions, [seed, 1, eval_index, setting_index]
for shot sampling and [seed, 2, restart] for SPSA perturbations.  Re-running
a configuration reproduces the trace bit for bit.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as sp_optimize

from . import circuits, measurement
from .encoding import EncodingMap, build_map, register_width
from .hamiltonian import (
    PenaltyConfig,
    SiteHamiltonian,
    extend_with_penalty,
    ground_energy,
)

ANSATZE = ("one_hot_ses", "binary_ses", "hardware_efficient")
PROTOCOLS = ("original", "binary", "exact_operator")
OPTIMIZERS = ("simplex", "spsa")

# protocol families each ansatz's register supports
_COMPATIBLE = {
    "one_hot_ses": ("original", "exact_operator"),
    "binary_ses": ("binary", "exact_operator"),
    "hardware_efficient": ("binary", "exact_operator"),
}

PLATEAU_TOL = 1e-9
PLATEAU_WINDOW_PER_DIM = 50
_MAX_SIM_WIDTH = 22

# block-sweep simplex defaults, tuned on disordered chains up to 16 sites
_BLOCK = 8
_VISIT_CAP = 100
_SPREAD = 0.8
_SHRINK = 0.63
_MIN_SPREAD = 5e-4
_MAX_SWEEPS = 16
_KICKS = (0.8, 0.5, 0.3)
_CRAWL_FRACTION = 0.005
_SWEEP_STALL = 1e-10


@dataclass(frozen=True)
class VqeConfig:
    """Everything a run needs; validated on construction."""

    hamiltonian: SiteHamiltonian
    ansatz: str = "one_hot_ses"
    protocol: str = "exact_operator"
    shots: int | None = None
    optimizer: str = "simplex"
    max_evaluations: int = 5000
    seed: int = 0
    penalty: PenaltyConfig | None = None
    layers: int = 2
    epsilon: float | None = None
    jobs: int = 1
    optimizer_options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ansatz not in ANSATZE:
            raise ValueError(f"unknown ansatz {self.ansatz!r}")
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.protocol not in _COMPATIBLE[self.ansatz]:
            raise ValueError(
                f"protocol {self.protocol!r} does not run on the {self.ansatz!r} register"
            )
        if self.shots is not None:
            if self.shots < 1:
                raise ValueError("shots must be >= 1")
            if self.protocol == "exact_operator":
                raise ValueError("shot mode needs a measurement protocol")
            if self.optimizer == "simplex":
                raise ValueError("the simplex optimizer requires exact mode; use spsa")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")
        if self.penalty is not None and self.ansatz != "hardware_efficient":
            raise ValueError("penalty extension only applies to hardware_efficient")
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass(frozen=True)
class RunPlan:
    """Config resolved into concrete registers and targets, built once."""

    config: VqeConfig
    dim: int
    target: SiteHamiltonian
    emap: EncodingMap | None
    exact_ground: float


@dataclass
class VqeResult:
    best_params: np.ndarray
    best_energy: float
    exact_ground: float
    relative_error: float
    evaluations_used: int
    restarts_used: int
    status: str
    trace: list
    wall_time_s: float
    diagnostics: dict


def parameter_count(config: VqeConfig) -> int:
    n = config.hamiltonian.n_sites
    if config.ansatz == "hardware_efficient":
        return 2 * register_width(n) * config.layers
    return 2 * (n - 1)


def prepare(config: VqeConfig) -> RunPlan:
    """Resolve registers, penalty extension and the exact reference energy."""
    h = config.hamiltonian
    n = h.n_sites
    if config.ansatz == "one_hot_ses":
        emap = None
        target = h
        if config.shots is not None and n > _MAX_SIM_WIDTH:
            raise ValueError(
                f"one-hot register of {n} qubits is too wide to sample; limit is {_MAX_SIM_WIDTH}"
            )
    elif config.ansatz == "binary_ses":
        emap = build_map(n, "shifted")
        target = h
        width = circuits.binary_register_layout(emap)["width"]
        if width > _MAX_SIM_WIDTH:
            raise ValueError(f"packed register would need {width} qubits; limit is {_MAX_SIM_WIDTH}")
    else:
        nq = register_width(n)
        penalty = config.penalty or PenaltyConfig.default_for(h, nq)
        if penalty.num_qubits != nq:
            raise ValueError(
                f"penalty register width {penalty.num_qubits} != required {nq}"
            )
        target = extend_with_penalty(h, penalty)
        emap = build_map(target.n_sites, "plain")
    return RunPlan(config, parameter_count(config), target, emap, ground_energy(target))


def _shot_seed(config: VqeConfig, eval_index: int):
    return (config.seed, 1, eval_index)


def evaluate_cost(plan, params, eval_index: int = 0) -> float:
    """One cost evaluation; deterministic given (plan, params, eval_index)."""
    if isinstance(plan, VqeConfig):
        plan = prepare(plan)
    config = plan.config
    h = config.hamiltonian
    n = h.n_sites

    if config.ansatz == "one_hot_ses":
        if config.shots is None:
            alpha = circuits.ses_site_amplitudes(n, params)
            if config.protocol == "exact_operator":
                return float((alpha.conj() @ h.matrix @ alpha).real)
            energy, _ = measurement.estimate_energy(
                h, alpha, "original", epsilon=config.epsilon, jobs=config.jobs
            )
            return energy
        state = circuits.simulate(circuits.build_ses_circuit(n, params))
        energy, _ = measurement.estimate_energy(
            h,
            state,
            "original",
            shots=config.shots,
            seed=_shot_seed(config, eval_index),
            epsilon=config.epsilon,
            jobs=config.jobs,
        )
        return energy

    if config.ansatz == "binary_ses":
        state = circuits.simulate(circuits.build_binary_ses_circuit(n, params, plan.emap))
        alpha, leak = circuits.binary_data_amplitudes(state, plan.emap)
        if leak > 1e-6:
            raise RuntimeError(f"packed ansatz leaked probability {leak:.3e} outside the data block")
        alpha = alpha / np.linalg.norm(alpha)
        if config.protocol == "exact_operator":
            return float((alpha.conj() @ h.matrix @ alpha).real)
        energy, _ = measurement.estimate_energy(
            h,
            alpha,
            "binary",
            shots=config.shots,
            seed=_shot_seed(config, eval_index) if config.shots else 0,
            emap=plan.emap,
            epsilon=config.epsilon,
            jobs=config.jobs,
        )
        return energy

    # hardware_efficient on the penalty-extended target
    nq = plan.emap.num_qubits
    state = circuits.simulate(
        circuits.build_hardware_efficient_circuit(nq, config.layers, params)
    )
    if config.protocol == "exact_operator":
        psi = state.amplitudes
        return float((psi.conj() @ plan.target.matrix @ psi).real)
    energy, _ = measurement.estimate_energy(
        plan.target,
        state,
        "binary",
        shots=config.shots,
        seed=_shot_seed(config, eval_index) if config.shots else 0,
        emap=plan.emap,
        epsilon=config.epsilon,
        jobs=config.jobs,
    )
    return energy


class _BudgetExhausted(Exception):
    pass


class _Plateau(Exception):
    pass


class _Tracker:
    """Evaluation ledger shared across restarts.

    Raises _Plateau when the running best fails to improve by PLATEAU_TOL over
    a full window of evaluations, and _BudgetExhausted at the evaluation cap.
    """

    def __init__(self, plan: RunPlan, budget: int, window: int):
        self.plan = plan
        self.budget = budget
        self.window = window
        self.evals = 0
        self.best = math.inf
        self.best_params = None
        self.trace = []  # (eval_index, energy, best_after)

    def cost(self, params) -> float:
        if self.evals >= self.budget:
            raise _BudgetExhausted
        energy = evaluate_cost(self.plan, params, self.evals)
        if energy < self.best:
            self.best = energy
            self.best_params = np.array(params, dtype=float, copy=True)
        self.trace.append((self.evals, energy, self.best))
        self.evals += 1
        if self.evals >= self.window:
            best_then = self.trace[-self.window][2]
            if best_then - self.best < PLATEAU_TOL:
                raise _Plateau
        return energy


def _initial_point(config: VqeConfig, dim: int, restart: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0, restart]))
    return np.pi - rng.uniform(0.0, 2.0 * np.pi, size=dim)


def _run_simplex(tracker: _Tracker, x0: np.ndarray, rng: np.random.Generator, opts: dict):
    """Block-coordinate Nelder-Mead sweeps with a shrinking spread schedule.

    Parameters are visited in fixed contiguous blocks.  Each visit runs an
    adaptive Nelder-Mead sub-search over one block, seeded with an axis-aligned
    simplex of the scheduled spread around the incumbent point; the spread
    shrinks geometrically sweep over sweep.  Two escape triggers share a small
    budget of random kicks: a fully stalled sweep, and two crawling sweeps
    (relative gain below ``crawl_fraction``) since the last kick.  A kick
    re-widens the spread schedule and is kept only if it improves the
    incumbent.  Returns when the kicks are spent or ``max_sweeps`` is reached;
    the caller then starts the next restart.
    """
    dim = x0.size
    block = int(opts.get("block", _BLOCK))
    cap = int(opts.get("visit_cap", _VISIT_CAP))
    spread0 = float(opts.get("spread", _SPREAD))
    shrink = float(opts.get("shrink", _SHRINK))
    max_sweeps = int(opts.get("max_sweeps", _MAX_SWEEPS))
    kicks = tuple(opts.get("kicks", _KICKS))
    crawl_fraction = float(opts.get("crawl_fraction", _CRAWL_FRACTION))
    blocks = [list(range(lo, min(lo + block, dim))) for lo in range(0, dim, block)]

    incumbent = np.array(x0, dtype=float, copy=True)
    incumbent_energy = tracker.cost(incumbent)

    def visit(idx, spread):
        nonlocal incumbent, incumbent_energy
        if tracker.evals >= tracker.budget:
            raise _BudgetExhausted
        center = incumbent.copy()

        def sub(x):
            nonlocal incumbent, incumbent_energy
            point = center.copy()
            point[idx] = x
            energy = tracker.cost(point)
            if energy < incumbent_energy:
                incumbent_energy = energy
                incumbent = point
            return energy

        start = center[idx]
        simplex = np.vstack([start, start + spread * np.eye(len(idx))])
        sp_optimize.minimize(
            sub,
            start,
            method="Nelder-Mead",
            options={
                "adaptive": True,
                "maxfev": max(1, min(cap, tracker.budget - tracker.evals)),
                "initial_simplex": simplex,
                "xatol": 1e-10,
                "fatol": 1e-12,
            },
        )

    schedule = 0
    kick_index = 0
    crawl_count = 0
    previous_gain = None
    for sweep in range(max_sweeps):
        spread = max(spread0 * shrink**schedule, _MIN_SPREAD)
        before = incumbent_energy
        for idx in blocks:
            visit(idx, spread)
        schedule += 1
        gain = before - incumbent_energy
        # a crawl shows steady but tiny gains; a fresh drop in gain is normal
        crawling = (
            sweep >= 3
            and gain < crawl_fraction * max(abs(incumbent_energy), 0.1)
            and previous_gain is not None
            and gain > 0.3 * previous_gain
        )
        previous_gain = gain
        if crawling:
            crawl_count += 1
        if gain < _SWEEP_STALL or crawl_count >= 2:
            if kick_index >= len(kicks):
                return
            magnitude = kicks[kick_index]
            kick_index += 1
            kicked = incumbent + rng.uniform(-magnitude, magnitude, size=dim)
            energy = tracker.cost(kicked)
            if energy < incumbent_energy:
                incumbent_energy = energy
                incumbent = kicked
            schedule = max(2, schedule - 3)
            crawl_count = 0


def _run_spsa(tracker: _Tracker, x0: np.ndarray, config: VqeConfig, restart: int):
    opts = config.optimizer_options
    a = float(opts.get("a", 0.2))
    c = float(opts.get("c", 0.1))
    alpha = float(opts.get("alpha", 0.602))
    gamma = float(opts.get("gamma", 0.101))
    iterations = max(1, (tracker.budget - tracker.evals) // 2)
    stability = float(opts.get("stability", max(1.0, 0.1 * iterations)))
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 2, restart]))
    theta = np.array(x0, dtype=float, copy=True)
    for k in range(iterations):
        ak = a / (k + 1 + stability) ** alpha
        ck = c / (k + 1) ** gamma
        delta = rng.choice([-1.0, 1.0], size=theta.size)
        y_plus = tracker.cost(theta + ck * delta)
        y_minus = tracker.cost(theta - ck * delta)
        gradient = (y_plus - y_minus) / (2.0 * ck) * delta
        theta = theta - ak * gradient


def optimize(config: VqeConfig) -> VqeResult:
    """Minimize the configured cost; restarts until plateau or budget.

    Status is ``converged`` when the plateau rule fires and ``non_converged``
    when the evaluation budget runs out first.
    """
    plan = prepare(config)
    tracker = _Tracker(plan, config.max_evaluations, PLATEAU_WINDOW_PER_DIM * plan.dim)
    start = time.perf_counter()
    status = "non_converged"
    restarts_started = 0
    try:
        while True:
            rng = np.random.default_rng(
                np.random.SeedSequence([config.seed, 0, restarts_started])
            )
            x0 = np.pi - rng.uniform(0.0, 2.0 * np.pi, size=plan.dim)
            restarts_started += 1
            if config.optimizer == "simplex":
                _run_simplex(tracker, x0, rng, config.optimizer_options)
            else:
                _run_spsa(tracker, x0, config, restarts_started - 1)
            if tracker.evals >= tracker.budget:
                raise _BudgetExhausted
    except _Plateau:
        status = "converged"
    except _BudgetExhausted:
        status = "non_converged"
    wall = time.perf_counter() - start

    best_params = tracker.best_params
    if best_params is None:
        raise RuntimeError("optimizer made no evaluations")
    rel = abs(tracker.best - plan.exact_ground) / max(abs(plan.exact_ground), 1e-12)
    diagnostics = final_report(plan, best_params)
    diagnostics["plateau_window"] = tracker.window
    return VqeResult(
        best_params=best_params,
        best_energy=tracker.best,
        exact_ground=plan.exact_ground,
        relative_error=rel,
        evaluations_used=tracker.evals,
        restarts_used=restarts_started,
        status=status,
        trace=tracker.trace,
        wall_time_s=wall,
        diagnostics=diagnostics,
    )


def final_report(plan: RunPlan, params) -> dict:
    """Exact-mode description of the state the optimizer settled on."""
    config = plan.config
    h = config.hamiltonian
    report = {"ansatz": config.ansatz, "protocol": config.protocol}
    if config.ansatz == "one_hot_ses":
        alpha = circuits.ses_site_amplitudes(h.n_sites, params)
        report["leak"] = 0.0
    elif config.ansatz == "binary_ses":
        state = circuits.simulate(circuits.build_binary_ses_circuit(h.n_sites, params, plan.emap))
        alpha, leak = circuits.binary_data_amplitudes(state, plan.emap)
        report["leak"] = leak
        alpha = alpha / np.linalg.norm(alpha)
    else:
        nq = plan.emap.num_qubits
        state = circuits.simulate(
            circuits.build_hardware_efficient_circuit(nq, config.layers, params)
        )
        psi = state.amplitudes
        physical = psi[: h.n_sites]
        weight = float(np.sum(np.abs(physical) ** 2))
        report["physical_weight"] = weight
        if weight > 1e-12:
            restricted = physical / math.sqrt(weight)
            report["physical_energy"] = float(
                (restricted.conj() @ h.matrix @ restricted).real
            )
        alpha = psi
    profile = measurement.AmplitudeProfile.from_amplitudes(alpha)
    report["active_sites"] = int(np.count_nonzero(profile.active))
    report["site_magnitudes"] = [float(r) for r in profile.magnitudes]
    target_energy = float((alpha.conj() @ plan.target.matrix @ alpha).real)
    report["exact_energy_of_state"] = target_energy
    return report
