"""Four-mode circuit-QED scenario, negativity sweeps, and the lattice pipeline.

Two tracks are run side by side for oscillating-wall drives:

* the exact track propagates the full window state with exact two-mode
  squeezers of strength ``B = beta_oscillating(...)``;
* the perturbative track keeps one noise factor ``C`` per mode and builds
  each driven pair's block state from the second-order formulas
  (:func:`perturbative_pair_state`).

Pairwise negativities are taken at the end of the drive that creates them,
so the later drives do not feed back into earlier curves.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .bogoliubov import (
    BoundaryKind,
    CavitySpec,
    MotionKind,
    MotionParams,
    beta_discrete_first_order,
    beta_oscillating,
    h_max,
    resonant_pairs,
)
from .entanglement import (
    NoiseFactors,
    get_log_base,
    log_base,
    log_negativity_two_mode,
    perturbative_pair_state,
    sequential_drive_state,
)
from .errors import InvalidArgumentError, PerturbativeWarning
from .gaussian_core import CovarianceState, partial_trace, vacuum
from .graph import (
    ClusterAdjacency,
    HGraph,
    accumulate_drive,
    nullifier_variances,
    to_cluster,
)
from .planner import (
    DrivePlan,
    UniformityFilter,
    equalize_repetitions,
    plan_square,
    resonance_phase,
)

GHZ = 2 * math.pi * 1e9
TRACKS = ("exact", "first")


@dataclass(frozen=True)
class DriveSpec:
    drive_omega_rad_per_s: float
    duration_s: float
    pump_phase_rad: float = 0.0

    def __post_init__(self):
        if not (self.drive_omega_rad_per_s > 0 and self.duration_s > 0):
            raise InvalidArgumentError("drive frequency and duration must be positive")


def _default_drives() -> tuple[DriveSpec, ...]:
    return (DriveSpec(16 * GHZ, 10e-9), DriveSpec(12 * GHZ, 10e-9),
            DriveSpec(20 * GHZ, 10e-9, math.pi / 2))


@dataclass(frozen=True)
class LatticeConfig:
    p: int = 29
    p_minus: int = 23
    p_plus: int = 31
    Lambda: float | None = None
    target_r: float = 0.1
    h: float = 0.01
    q_max: int = 3
    length_m: float = 1.0
    speed_c_m_per_s: float = 299792458.0


@dataclass(frozen=True)
class ExperimentConfig:
    """Scenario parameters. JSON field names carry their SI units."""

    fundamental_omega_rad_per_s: float = 1 * GHZ
    speed_c_m_per_s: float = 1.0e8
    epsilon: float = 0.01
    drives: tuple[DriveSpec, ...] = field(default_factory=_default_drives)
    mode_window: tuple[int, int] = (2, 5)
    cutoff: int = 7
    log_base: str = "e"
    samples_per_drive: int = 10
    sweep_t_max_s: float = 20e-9
    sweep_steps: int = 20
    lattice_cutoff: int = 64
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    output_path: str = "out"

    def __post_init__(self):
        drives = tuple(d if isinstance(d, DriveSpec) else DriveSpec(**d) for d in self.drives)
        object.__setattr__(self, "drives", drives)
        object.__setattr__(self, "mode_window", tuple(int(m) for m in self.mode_window))
        if isinstance(self.lattice, dict):
            object.__setattr__(self, "lattice", LatticeConfig(**self.lattice))
        if not drives:
            raise InvalidArgumentError("at least one drive is required")
        if not 0 < self.epsilon < 0.1:
            raise InvalidArgumentError(f"epsilon must lie in (0, 0.1), got {self.epsilon}")
        lo, hi = self.mode_window if len(self.mode_window) == 2 else (1, 0)
        if not 0 <= lo < hi <= self.cutoff:
            raise InvalidArgumentError(f"mode_window {self.mode_window} must lie within cutoff")
        if self.log_base not in ("e", "2"):
            raise InvalidArgumentError("log_base must be 'e' or '2'")
        if self.fundamental_omega_rad_per_s <= 0 or self.speed_c_m_per_s <= 0:
            raise InvalidArgumentError("frequencies and speeds must be positive")
        if self.samples_per_drive < 1 or self.sweep_steps < 2 or self.sweep_t_max_s <= 0:
            raise InvalidArgumentError("invalid sampling parameters")

    @property
    def cavity(self) -> CavitySpec:
        return CavitySpec.from_fundamental(self.fundamental_omega_rad_per_s,
                                           BoundaryKind.QUARTER_WAVE, self.speed_c_m_per_s)

    @property
    def window_modes(self) -> list[int]:
        return list(range(self.mode_window[0], self.mode_window[1] + 1))

    def with_durations(self, durations) -> "ExperimentConfig":
        drives = tuple(DriveSpec(d.drive_omega_rad_per_s, float(t), d.pump_phase_rad)
                       for d, t in zip(self.drives, durations, strict=True))
        return _replace(self, drives=drives)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["drives"] = [asdict(d) for d in self.drives]
        out["mode_window"] = list(self.mode_window)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgumentError(f"unknown config keys: {sorted(unknown)}")
        try:
            lattice = data.get("lattice")
            if lattice is not None:
                bad = set(lattice) - {f.name for f in fields(LatticeConfig)}
                if bad:
                    raise InvalidArgumentError(f"unknown lattice keys: {sorted(bad)}")
            return cls(**data)
        except TypeError as exc:
            raise InvalidArgumentError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidArgumentError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise InvalidArgumentError("config must be a JSON object")
        return cls.from_dict(data)


def _replace(cfg, **changes):
    data = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    data.update(changes)
    return type(cfg)(**data)


@dataclass(frozen=True)
class DriveSummary:
    index: int
    harmonic: float
    pairs: tuple[tuple[int, int], ...]
    ignored_pairs: tuple[tuple[int, int], ...]
    betas: dict
    h_max: float


@dataclass
class SweepResult:
    """Rows ``(time_s, pair, track, value, nu_tilde)`` plus the final state and graph."""

    rows: list
    final_state: CovarianceState
    final_graph: HGraph
    nullifier_report: np.ndarray
    cluster_state: CovarianceState | None = None
    adjacency: ClusterAdjacency | None = None
    drives: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    log_base: str = field(default_factory=get_log_base)
    extra: dict = field(default_factory=dict)

    def rows_csv(self) -> str:
        lines = ["time_s,pair,value,nu_tilde,method,log_base,track"]
        for r in self.rows:
            lines.append(f"{r['time_s']:.12e},{r['pair'][0]}-{r['pair'][1]},{r['value']:.12e},"
                         f"{r['nu_tilde']:.12e},symplectic,{self.log_base},{r['track']}")
        return "\n".join(lines) + "\n"

    def nullifier_csv(self) -> str:
        lines = ["node,mean,variance"]
        nodes = self.adjacency.nodes if self.adjacency else self.final_graph.nodes
        for node, v in zip(nodes, self.nullifier_report):
            lines.append(f"{node},{0.0:.12e},{v:.12e}")
        return "\n".join(lines) + "\n"


def drive_pairs(config: ExperimentConfig, drive: DriveSpec):
    """In-window resonant pairs of ``drive`` and the ones left out."""
    pairs = resonant_pairs(config.cavity, drive.drive_omega_rad_per_s, config.cutoff)
    lo, hi = config.mode_window
    inside = [pr for pr in pairs if lo <= pr[0] and pr[1] <= hi]
    outside = [pr for pr in pairs if pr not in inside]
    return inside, outside


def _beta(config: ExperimentConfig, pair, drive: DriveSpec, duration: float) -> float:
    w0 = config.fundamental_omega_rad_per_s
    return beta_oscillating(pair[0], pair[1], config.epsilon, w0, duration,
                            drive.drive_omega_rad_per_s / w0, BoundaryKind.QUARTER_WAVE)


def _pair_negativity(state: CovarianceState, modes: list[int], pair) -> tuple[float, float]:
    sub = partial_trace(state, [modes.index(pair[0]), modes.index(pair[1])])
    rep = log_negativity_two_mode(sub, tuple(pair))
    return rep.value, rep.nu_tilde


def _first_order_negativity(noise: NoiseFactors, pair, B: float) -> tuple[float, float]:
    st = perturbative_pair_state(noise.get(pair[0]), noise.get(pair[1]), B)
    rep = log_negativity_two_mode(st, tuple(pair), allow_unphysical=True)
    return rep.value, rep.nu_tilde


def _apply_drive(config, state, noise, graph, drive, pairs, duration):
    modes = config.window_modes
    betas = {}
    for pr in pairs:
        b = _beta(config, pr, drive, duration)
        betas[pr] = b
        state = sequential_drive_state(state, (modes.index(pr[0]), modes.index(pr[1])), b,
                                       drive.pump_phase_rad)
        graph = accumulate_drive(graph, pr, b, drive.pump_phase_rad)
    for pr, b in betas.items():
        noise = noise.after_drive(pr, b * math.cos(2 * drive.pump_phase_rad))
    return state, noise, graph, betas


def _negativities_after(config, state_before, noise_before, drive, pairs, duration):
    """Per pair and track, negativity at the end of a drive of the given duration."""
    modes = config.window_modes
    state, _, _, betas = _apply_drive(config, state_before, noise_before,
                                      HGraph.empty(modes), drive, pairs, duration)
    out = {}
    for pr in pairs:
        out[(pr, "exact")] = _pair_negativity(state, modes, pr)
        b_eff = betas[pr] * math.cos(2 * drive.pump_phase_rad)
        out[(pr, "first")] = _first_order_negativity(noise_before, pr, b_eff)
    return out


def _check_motion(config: ExperimentConfig, drive: DriveSpec, duration: float) -> float:
    motion = MotionParams(MotionKind.OSCILLATING, epsilon=config.epsilon,
                          drive_omega=drive.drive_omega_rad_per_s, duration_T=duration,
                          fundamental_omega=config.fundamental_omega_rad_per_s)
    return motion.h_max(config.cavity)


def run_square_experiment(config: ExperimentConfig, order: str = "both",
                          adjacency_method: str = "first_order") -> SweepResult:
    """Drive the window modes from vacuum with every configured drive in turn.

    Each drive is sampled at ``samples_per_drive`` points; rows carry the
    cumulative time. The final exact state is converted to a cluster state
    and its nullifier variances are reported.
    """
    tracks = _tracks(order)
    with log_base(config.log_base):
        modes = config.window_modes
        state, noise, graph = vacuum(len(modes)), NoiseFactors(), HGraph.empty(modes)
        rows, summaries, notes = [], [], []
        elapsed = 0.0
        for i, drive in enumerate(config.drives):
            inside, outside = drive_pairs(config, drive)
            hm = _check_motion(config, drive, drive.duration_s)
            if not inside:
                notes.append(f"drive {i}: no resonant pair inside mode window {config.mode_window}")
                warnings.warn(notes[-1], PerturbativeWarning, stacklevel=2)
            n = config.samples_per_drive
            for s in range(1, n + 1):
                t = drive.duration_s * s / n
                negs = _negativities_after(config, state, noise, drive, inside, t)
                for (pr, track), (value, nu) in sorted(negs.items()):
                    if track in tracks:
                        rows.append({"time_s": elapsed + t, "pair": pr, "track": track,
                                     "value": value, "nu_tilde": nu})
            state, noise, graph, betas = _apply_drive(config, state, noise, graph, drive,
                                                      inside, drive.duration_s)
            summaries.append(DriveSummary(i, drive.drive_omega_rad_per_s /
                                          config.fundamental_omega_rad_per_s,
                                          tuple(inside), tuple(outside), betas, hm))
            elapsed += drive.duration_s
        cluster, adj = to_cluster(state, graph, adjacency_method)
        null = nullifier_variances(cluster, adj)
        return SweepResult(rows, state, graph, null, cluster, adj, summaries, notes,
                           config.log_base, {"noise_factors": dict(sorted(noise.C_values.items()))})


def _tracks(order: str) -> tuple[str, ...]:
    if order == "both":
        return TRACKS
    if order in TRACKS:
        return (order,)
    raise InvalidArgumentError(f"order must be 'first', 'exact' or 'both', got {order!r}")


def _states_before_each_drive(config: ExperimentConfig):
    """Exact state and noise factors just before each drive (configured durations)."""
    modes = config.window_modes
    state, noise, graph = vacuum(len(modes)), NoiseFactors(), HGraph.empty(modes)
    out = []
    for drive in config.drives:
        inside, _ = drive_pairs(config, drive)
        out.append((state, noise, inside))
        state, noise, graph, _ = _apply_drive(config, state, noise, graph, drive, inside,
                                              drive.duration_s)
    return out


def negativity_sweep(config: ExperimentConfig, pair_list=None, t_max: float | None = None,
                     steps: int | None = None, order: str = "both") -> SweepResult:
    """Negativity of each pair as a function of the duration of its own drive.

    Earlier drives run for their configured durations, so pairs created by
    later drives start from the noisy reduced state those leave behind.
    """
    t_max = config.sweep_t_max_s if t_max is None else t_max
    steps = config.sweep_steps if steps is None else steps
    if steps < 2 or t_max <= 0:
        raise InvalidArgumentError("need steps >= 2 and t_max > 0")
    tracks = _tracks(order)
    wanted = None if pair_list is None else {tuple(p) for p in pair_list}
    with log_base(config.log_base):
        before = _states_before_each_drive(config)
        rows = []
        for s in range(1, steps + 1):
            t = t_max * s / steps
            for drive, (state, noise, inside) in zip(config.drives, before):
                pairs = [pr for pr in inside if wanted is None or pr in wanted]
                if not pairs:
                    continue
                for (pr, track), (value, nu) in sorted(
                        _negativities_after(config, state, noise, drive, pairs, t).items()):
                    if track in tracks:
                        rows.append({"time_s": t, "pair": pr, "track": track,
                                     "value": value, "nu_tilde": nu})
        rows.sort(key=lambda r: (r["time_s"], r["pair"], r["track"]))
        final = run_square_experiment(config.with_durations([t_max] * len(config.drives)),
                                      order=order)
        return SweepResult(rows, final.final_state, final.final_graph, final.nullifier_report,
                           final.cluster_state, final.adjacency, final.drives, final.warnings,
                           config.log_base)


def own_drive_negativities(config: ExperimentConfig, track: str = "exact") -> dict:
    """Negativity of every driven pair at the end of its own drive."""
    out = {}
    with log_base(config.log_base):
        for drive, (state, noise, inside) in zip(config.drives, _states_before_each_drive(config)):
            negs = _negativities_after(config, state, noise, drive, inside, drive.duration_s)
            for pr in inside:
                out[pr] = negs[(pr, track)][0]
    return out


def final_negativities(config: ExperimentConfig) -> dict:
    """Negativity of every driven pair in the state left after all drives."""
    res = run_square_experiment(config, order="exact")
    modes = config.window_modes
    with log_base(config.log_base):
        return {pr: _pair_negativity(res.final_state, modes, pr)[0]
                for d in res.drives for pr in d.pairs}


def relative_spread(values) -> float:
    v = np.asarray(list(values), dtype=float)
    return float((v.max() - v.min()) / v.max())


@dataclass(frozen=True)
class EqualizationResult:
    durations: tuple[float, ...]
    negativities: dict
    spread: float
    final_state_negativities: dict
    final_state_spread: float


def equalize_drive_times(config: ExperimentConfig, track: str = "exact") -> EqualizationResult:
    """Pick later drive durations so their pairs match the first drive's mean negativity.

    The first drive keeps its configured duration. Each later duration is
    found by root bracketing on the negativity of the pair(s) that drive
    creates, evaluated at the end of that drive. Pairs created together by
    one drive cannot be separated by timing, so their ratio is what limits
    the achievable spread.
    """
    durations = [d.duration_s for d in config.drives]
    first = own_drive_negativities(config, track)
    first_pairs = drive_pairs(config, config.drives[0])[0]
    target = float(np.mean([first[pr] for pr in first_pairs]))
    for i in range(1, len(config.drives)):
        def level(t, i=i):
            cfg = config.with_durations(durations[:i] + [t] + durations[i + 1:])
            negs = own_drive_negativities(cfg, track)
            pairs = drive_pairs(cfg, cfg.drives[i])[0]
            return float(np.mean([negs[pr] for pr in pairs])) - target
        hi = durations[i]
        while level(hi) < 0:
            hi *= 2
            if hi > 1e3 * durations[0]:
                raise InvalidArgumentError(f"cannot reach the target level with drive {i}")
        durations[i] = brentq(level, 1e-6 * hi, hi, xtol=1e-18, rtol=1e-13)
    cfg = config.with_durations(durations)
    negs = own_drive_negativities(cfg, track)
    fin = final_negativities(cfg)
    return EqualizationResult(tuple(durations), negs, relative_spread(negs.values()),
                              fin, relative_spread(fin.values()))


@dataclass(frozen=True)
class DiscrepancyResult:
    h_max_values: tuple[float, ...]
    discrepancies: tuple[float, ...]
    slope: float
    c_fit: float


def config_for_h_max(config: ExperimentConfig, h_target: float, duration_s: float) -> ExperimentConfig:
    """Config whose strongest drive reaches ``h_max = h_target`` with every drive lasting ``duration_s``."""
    w_max = max(d.drive_omega_rad_per_s for d in config.drives)
    cav = config.cavity
    eps = h_target / h_max(1.0, w_max, cav.length_L, cav.speed_c)
    return _replace(config.with_durations([duration_s] * len(config.drives)), epsilon=eps)


def track_discrepancy(config: ExperimentConfig, h_values=(1e-4, 3e-4, 1e-3),
                      duration_s: float = 3e-6) -> DiscrepancyResult:
    """Largest |exact - first-order| negativity gap for each ``h_max``, with a log-log fit."""
    discs = []
    for h in h_values:
        cfg = config_for_h_max(config, h, duration_s)
        exact = own_drive_negativities(cfg, "exact")
        first = own_drive_negativities(cfg, "first")
        discs.append(max(abs(exact[pr] - first[pr]) for pr in exact))
    slope = float(np.polyfit(np.log(h_values), np.log(discs), 1)[0])
    c_fit = float(np.exp(np.mean(np.log(np.asarray(discs) / np.asarray(h_values) ** 2))))
    return DiscrepancyResult(tuple(h_values), tuple(discs), slope, c_fit)


@dataclass
class LatticeResult:
    plan: DrivePlan
    repetitions: dict
    state: CovarianceState
    graph: HGraph
    edge_negativities: dict
    spurious_negativities: dict
    nullifiers: dict
    log_base: str = field(default_factory=get_log_base)

    def edges_csv(self) -> str:
        lines = ["k,kp,label,in_lattice,weight,negativity"]
        for e in sorted(self.plan.predicted_edges, key=lambda e: e.pair):
            lines.append(f"{e.k},{e.kp},{e.label},{int(e.in_lattice)},{e.weight:.12e},"
                         f"{self.edge_negativities[e.pair]:.12e}")
        return "\n".join(lines) + "\n"

    def nullifier_csv(self, method: str) -> str:
        lines = ["node,mean,variance"]
        for node, v in zip(self.graph.nodes, self.nullifiers[method]):
            lines.append(f"{node},{0.0:.12e},{v:.12e}")
        return "\n".join(lines) + "\n"


def plan_and_simulate(p: int, p_minus: int, p_plus: int, filter: UniformityFilter | None = None,
                      target_r: float = 0.1, h: float = 0.01, q_max: int = 3,
                      length_L: float = 1.0, speed_c: float = 1.0, cutoff: int = 64,
                      methods=("first_order", "exact")) -> LatticeResult:
    """Plan a square patch, run it from vacuum, and score the resulting cluster.

    Every segment is repeated ``N`` times (see :func:`equalize_repetitions`)
    and squeezes each resonant pair of plan modes with
    ``r = N beta cos(2 pi k / s)``; spurious pairs among plan modes are
    driven with their own (weaker) coefficients.
    """
    plan = plan_square(p, p_minus, p_plus, length_L, speed_c, filter, h, q_max)
    modes = plan.nodes
    if max(modes) > cutoff:
        raise InvalidArgumentError(f"plan uses mode {max(modes)} above cutoff {cutoff}")
    reps = equalize_repetitions(plan, target_r)
    state, graph = vacuum(len(modes)), HGraph.empty(modes)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PerturbativeWarning)
        for seg in plan.segments:
            n_rep = reps[seg.label]
            if n_rep == 0:
                continue
            drives = [(e.k, e.kp, e.weight) for e in plan.predicted_edges if e.label == seg.label]
            drives += [(e.l, e.lp, beta_discrete_first_order(e.l, e.lp, h))
                       for e in plan.spurious_edges if e.label == seg.label]
            for k, kp, beta in drives:
                r = n_rep * (beta * math.cos(resonance_phase(k, seg.target_sum)))
                state = sequential_drive_state(state, (modes.index(k), modes.index(kp)), r)
                graph = accumulate_drive(graph, (k, kp), r)

    def neg(pair):
        sub = partial_trace(state, [modes.index(pair[0]), modes.index(pair[1])])
        return log_negativity_two_mode(sub, pair).value

    edge_negs = {e.pair: neg(e.pair) for e in plan.predicted_edges}
    spur_negs = {(e.l, e.lp): neg((e.l, e.lp)) for e in plan.spurious_edges}
    nulls = {}
    for method in methods:
        cluster, adj = to_cluster(state, graph, method)
        nulls[method] = nullifier_variances(cluster, adj)
    return LatticeResult(plan, reps, state, graph, edge_negs, spur_negs, nulls)
