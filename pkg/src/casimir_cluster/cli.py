"""Command-line entry point: ``casimir-cluster <subcommand> [options]``.

Exit codes: 0 success, 1 failed invariant check, 2 invalid config, 3 infeasible plan.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import entanglement as ent
from .bogoliubov import BoundaryKind, CavitySpec, perturbative_block, resonant_pairs
from .errors import InvalidArgumentError, PerturbativeWarning, PlanInfeasibleError
from .experiment import (
    ExperimentConfig,
    negativity_sweep,
    plan_and_simulate,
    run_square_experiment,
)
from .gaussian_core import (
    CovarianceState,
    apply_symplectic,
    phase_shift_matrix,
    two_mode_squeezer,
    vacuum,
)
from .graph import HGraph, accumulate_drive, bipartition
from .planner import UniformityFilter, plan_ladder, plan_square

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2, 3
_METHODS = {"first": ("first_order",), "exact": ("exact",), "both": ("first_order", "exact")}


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8", newline="\n")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _state_json(state: CovarianceState) -> str:
    return _dumps({"n_modes": state.n_modes, "mean": state.mean.tolist(),
                   "sigma": state.sigma.tolist()})


def _drive_json(res) -> list:
    return [{"index": d.index, "harmonic": d.harmonic, "pairs": [list(p) for p in d.pairs],
             "ignored_pairs": [list(p) for p in d.ignored_pairs],
             "betas": {f"{k}-{kp}": b for (k, kp), b in d.betas.items()}, "h_max": d.h_max}
            for d in res.drives]


def cmd_simulate(cfg: ExperimentConfig, args) -> int:
    res = run_square_experiment(cfg, order=args.order)
    out = Path(args.out)
    _write(out, "sweep.csv", res.rows_csv())
    _write(out, "nullifiers.csv", res.nullifier_csv())
    _write(out, "graph.json", res.final_graph.to_json() + "\n")
    _write(out, "graph.dot", res.final_graph.to_dot())
    _write(out, "state.json", _state_json(res.final_state))
    _write(out, "summary.json", _dumps({
        "log_base": res.log_base, "drives": _drive_json(res), "warnings": res.warnings,
        "nullifier_variances": res.nullifier_report.tolist(),
        "adjacency": res.adjacency.A_matrix.tolist(), "nodes": list(res.adjacency.nodes),
        "noise_factors": {str(k): v for k, v in res.extra["noise_factors"].items()}}))
    return EXIT_OK


def cmd_sweep(cfg: ExperimentConfig, args) -> int:
    res = negativity_sweep(cfg, order=args.order)
    out = Path(args.out)
    _write(out, "sweep.csv", res.rows_csv())
    _write(out, "summary.json", _dumps({"log_base": res.log_base, "drives": _drive_json(res),
                                        "t_max_s": cfg.sweep_t_max_s, "steps": cfg.sweep_steps}))
    return EXIT_OK


def _filter(cfg: ExperimentConfig):
    lam = cfg.lattice.Lambda
    return UniformityFilter(lam) if lam is not None else None


def cmd_plan(cfg: ExperimentConfig, args) -> int:
    lat = cfg.lattice
    plan = plan_square(lat.p, lat.p_minus, lat.p_plus, lat.length_m, lat.speed_c_m_per_s,
                       _filter(cfg), lat.h, lat.q_max)
    ladder = plan_ladder(lat.p, lat.length_m, lat.speed_c_m_per_s, _filter(cfg), lat.h)
    out = Path(args.out)
    _write(out, "plan.json", plan.to_json() + "\n")
    _write(out, "plan.dot", plan.to_dot("square"))
    _write(out, "ladder.json", ladder.to_json() + "\n")
    _write(out, "ladder.dot", ladder.to_dot("ladder"))
    return EXIT_OK


def cmd_lattice(cfg: ExperimentConfig, args) -> int:
    lat = cfg.lattice
    with ent.log_base(cfg.log_base):
        res = plan_and_simulate(lat.p, lat.p_minus, lat.p_plus, _filter(cfg), lat.target_r,
                                lat.h, lat.q_max, lat.length_m, lat.speed_c_m_per_s,
                                cfg.lattice_cutoff, _METHODS[args.order])
    out = Path(args.out)
    _write(out, "plan.json", res.plan.to_json() + "\n")
    _write(out, "edges.csv", res.edges_csv())
    for method in res.nullifiers:
        _write(out, f"nullifiers_{method}.csv", res.nullifier_csv(method))
    _write(out, "graph.dot", res.graph.to_dot("lattice"))
    intended = list(res.edge_negativities.values())
    _write(out, "summary.json", _dumps({
        "log_base": res.log_base, "repetitions": res.repetitions,
        "min_edge_negativity": min(intended) if intended else 0.0,
        "spurious_negativities": {f"{a}-{b}": v for (a, b), v in res.spurious_negativities.items()},
        "max_nullifier_variance": {m: float(v.max()) for m, v in res.nullifiers.items()}}))
    return EXIT_OK


def invariant_checks() -> dict[str, bool]:
    """Small deterministic invariant suite (no random numbers)."""
    checks = {}
    st = vacuum(3)
    for i, (j, k, r, phi) in enumerate([(0, 1, 0.3, 0.0), (1, 2, 0.2, 0.7), (0, 2, 0.5, 1.3)]):
        st = apply_symplectic(st, two_mode_squeezer(3, j, k, r, phi))
        st = apply_symplectic(st, phase_shift_matrix(3, i, 0.4 * (i + 1)))
    checks["physical_after_gates"] = st.is_physical()
    checks["pure_after_gates"] = abs(ent.purity(st) - 1) < 1e-9
    checks["vacuum_negativity_zero"] = ent.log_negativity_two_mode(vacuum(2)).value == 0.0
    checks["closed_form_matches_symplectic"] = all(
        abs(ent.log_negativity_closed_form(b) - ent.log_negativity_two_mode(
            CovarianceState(_statefirst(b)), allow_unphysical=True).value) < 1e-12
        for b in np.arange(0, 0.41, 0.01))
    cavity = CavitySpec.from_fundamental(2 * math.pi * 1e9, BoundaryKind.QUARTER_WAVE)
    checks["resonant_pairs_16GHz"] = resonant_pairs(cavity, 2 * math.pi * 16e9, 5) == [(2, 5), (3, 4)]
    ladder = plan_ladder(7)
    g = HGraph.empty(range(1, 9))
    for e in ladder.predicted_edges:
        g = accumulate_drive(g, e.pair, e.weight)
    try:
        bipartition(g)
        checks["ladder_bipartite"] = True
    except ValueError:
        checks["ladder_bipartite"] = False
    sq = plan_square(29, 23, 31)
    checks["square_edges_odd"] = all((e.k + e.kp) % 2 == 1 for e in sq.predicted_edges)
    return checks


def _statefirst(b: float) -> np.ndarray:
    return perturbative_block(1 + b * b, 1 + b * b, -2 * b * np.diag([1.0, -1.0]))


def cmd_check(cfg: ExperimentConfig, args) -> int:
    with ent.log_base(cfg.log_base):
        checks = invariant_checks()
    _write(Path(args.out), "check.json", _dumps(checks))
    for name, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return EXIT_OK if all(checks.values()) else EXIT_CHECK_FAILED


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "plan": cmd_plan,
            "lattice": cmd_lattice, "check": cmd_check}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="casimir-cluster",
                                     description="Gaussian cluster states from moving-boundary drives.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"simulate": "run the four-mode square experiment",
             "sweep": "negativity versus drive duration",
             "plan": "export ladder and square drive plans",
             "lattice": "plan and simulate a square lattice patch",
             "check": "run the invariant suite"}
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON config file (defaults used when omitted)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--log-base", choices=("e", "2"), default=None)
        p.add_argument("--order", choices=("first", "exact", "both"), default="both")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
        if args.log_base:
            cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "log_base": args.log_base})
    except InvalidArgumentError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out is None:
        args.out = cfg.output_path
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PerturbativeWarning)
            return COMMANDS[args.command](cfg, args)
    except PlanInfeasibleError as exc:
        print(f"infeasible plan: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InvalidArgumentError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
