"""Command-line interface: gen, solve, bench, sweep, decompose."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import bench, model, sim
from .bitstrings import index_to_bits
from .ising import PenaltySpec, build_problem, encode_constraint
from .paulidecomp import decompose_stepped_constraint
from .vqe import OptimizerConfig, run_trials

DEFAULT_METHOD_PARAMS = {
    "step": {"lam": 50.0},
    "exponential": {"lam1": 1.0, "lam2": 3.0},
    "unbalanced_quadratic": {"lam1": 1.0, "lam2": 0.5},
    "slack_quadratic": {"lam": 50.0},
}

METHOD_ALIASES = {
    "step": "step",
    "exp": "exponential",
    "exponential": "exponential",
    "unbalanced": "unbalanced_quadratic",
    "quadratic": "unbalanced_quadratic",
    "slack": "slack_quadratic",
    "normal": "slack_quadratic",
}


def _load_config(path):
    if not path:
        return {}
    with open(path) as f:
        return json.load(f)


def _optimizer_from_config(config: dict) -> OptimizerConfig:
    fields = {f.name for f in dataclasses.fields(OptimizerConfig)}
    given = config.get("optimizer", {})
    unknown = set(given) - fields
    if unknown:
        raise ValueError(f"unknown optimizer config keys: {sorted(unknown)}")
    return OptimizerConfig(**given)


def _method_spec(name: str, config: dict, overrides: dict) -> PenaltySpec:
    kind = METHOD_ALIASES.get(name)
    if kind is None:
        raise ValueError(f"unknown method {name!r}; choose from {sorted(METHOD_ALIASES)}")
    params = dict(DEFAULT_METHOD_PARAMS[kind])
    params.update(config.get("methods", {}).get(name, {}))
    params.update(config.get("methods", {}).get(kind, {}))
    params.update({k: v for k, v in overrides.items() if v is not None})
    return PenaltySpec(kind=kind, **params)


def _load_instances(path: str) -> list[tuple[str, model.MkpInstance]]:
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.json"))
        if not files:
            raise FileNotFoundError(f"no *.json instances in {p}")
        return [(f.stem, model.load_instance(f)) for f in files]
    return [(p.stem, model.load_instance(p))]


def _parse_grid(text: str) -> list[float]:
    """Grid syntax: 'a..b' inclusive integer range, or comma-separated values."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return [float(x) for x in range(int(lo), int(hi) + 1)]
    return [float(x) for x in text.split(",")]


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        seed = args.seed + i
        inst = model.generate_instance(args.knapsacks, args.items, seed)
        name = f"mkp_K{args.knapsacks}_L{args.items}_s{seed}.json"
        model.save_instance(inst, out / name)
    print(f"wrote {args.count} instances to {out}")
    return 0


def cmd_solve(args) -> int:
    config = _load_config(args.config)
    cfg = _optimizer_from_config(config)
    spec = _method_spec(
        args.method, config,
        {"lam": args.lam, "lam1": args.lam1, "lam2": args.lam2},
    )
    iid, inst = _load_instances(args.instance)[0]
    program = model.to_program(inst)
    dp = build_problem(program, spec)
    budget = args.budget if args.budget is not None else sim.MAX_QUBITS
    if dp.n_qubits > budget:
        print(f"error: {dp.n_qubits} qubits needed, budget is {budget}", file=sys.stderr)
        return 1
    outcomes = run_trials(dp, n_trials=args.trials, base_seed=args.seed, cfg=cfg)
    top = outcomes[0]
    solution_bits = top.best_bits[: dp.n_vars]
    opt = model.brute_force_solve(program)
    result = {
        "instance": iid,
        "method": spec.label,
        "n_qubits": dp.n_qubits,
        "best": {
            "bits": solution_bits,
            "objective": float(top.best_objective),
            "feasible": top.feasible,
            "loss": top.final_loss,
            "trial_seed": top.trial_seed,
        },
        "optimum": {"bits": opt.bits, "objective": float(opt.objective_value)},
        "opt_gap": None
        if opt.objective_value == 0
        else bench.opt_gap(top.best_objective, opt.objective_value),
        "trials": [
            {
                "seed": o.trial_seed,
                "loss": o.final_loss,
                "feasible": o.feasible,
                "objective": float(o.best_objective),
                "evals": o.eval_count,
            }
            for o in outcomes
        ],
    }
    print(json.dumps(result, indent=2))
    return 0


def cmd_bench(args) -> int:
    config = _load_config(args.config)
    cfg = _optimizer_from_config(config)
    methods = [_method_spec(name.strip(), config, {}) for name in args.methods.split(",")]
    instances = _load_instances(args.instances)
    report = bench.run_battery(
        instances,
        methods,
        cfg=cfg,
        seed=args.seed if args.seed is not None else config.get("seed", 0),
        n_trials=args.trials if args.trials is not None else config.get("n_trials", 3),
        qubit_budget=args.budget if args.budget is not None else config.get("qubit_budget"),
    )
    out = Path(args.out)
    report.to_csv(out)
    report.to_json(out.with_suffix(".json"))
    print(f"{'method':<34} {'feas %':>8} {'opt %':>8} {'mean gap':>10}")
    for a in report.aggregates:
        gap = "n/a" if a.mean_opt_gap is None else f"{a.mean_opt_gap:.3f}"
        print(f"{a.method:<34} {a.feasibility_rate:8.1f} {a.optimality_rate:8.1f} {gap:>10}")
    print(f"report written to {out} and {out.with_suffix('.json')}")
    return 0


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    cfg = _optimizer_from_config(config)
    instances = _load_instances(args.instances)
    points = bench.sweep_lambda2(
        instances,
        lam1=args.lam1,
        lam2_grid=_parse_grid(args.lam2),
        cfg=cfg,
        seed=args.seed if args.seed is not None else config.get("seed", 0),
        n_trials=args.trials if args.trials is not None else config.get("n_trials", 3),
        qubit_budget=args.budget if args.budget is not None else config.get("qubit_budget"),
    )
    lines = ["lambda2,feasibility_rate,optimality_rate,mean_opt_gap"]
    for pt in points:
        gap = "" if pt.mean_opt_gap is None else f"{pt.mean_opt_gap:.6f}"
        lines.append(f"{pt.lam2:g},{pt.feasibility_rate:.2f},{pt.optimality_rate:.2f},{gap}")
    text = "\n".join(lines)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"sweep written to {args.out}")
    else:
        print(text)
    return 0


def cmd_decompose(args) -> int:
    _, inst = _load_instances(args.instance)[0]
    program = model.to_program(inst)
    if not 0 <= args.constraint < len(program.constraints):
        print(
            f"error: constraint index {args.constraint} out of range "
            f"(instance has {len(program.constraints)})",
            file=sys.stderr,
        )
        return 1
    config = _load_config(args.config)
    overrides = {"lam": args.lam, "lam1": args.lam1, "lam2": args.lam2}
    if overrides["lam"] is None and METHOD_ALIASES.get(args.method) in (
        "step",
        "slack_quadratic",
    ):
        overrides["lam"] = 1.0  # unscaled terms read better for inspection
    spec = _method_spec(args.method, config, overrides)
    h = encode_constraint(program.constraints[args.constraint])
    poly = decompose_stepped_constraint(h, spec, n_qubits=program.n_vars)
    for mask in sorted(poly.terms):
        mask_bits = index_to_bits(mask, poly.n_qubits)
        print(f"{poly.terms[mask]:+.12g}  {mask_bits}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepvqe",
        description="Penalty-VQE solver for multiple knapsack instances",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate random instances as JSON files")
    p.add_argument("--knapsacks", type=int, required=True)
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve one instance, print outcome JSON")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", default="step")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--lambda1", dest="lam1", type=float)
    p.add_argument("--lambda2", dest="lam2", type=float)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int)
    p.add_argument("--config")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run an instance battery across methods")
    p.add_argument("--instances", required=True, help="directory of instance JSONs")
    p.add_argument("--methods", default="slack,unbalanced,step,exp")
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="CSV path; JSON summary written beside it")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="exponential-penalty lambda2 sweep")
    p.add_argument("--instances", required=True)
    p.add_argument("--lambda1", dest="lam1", type=float, default=1.0)
    p.add_argument("--lambda2", dest="lam2", default="1..10", help="'a..b' or comma list")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("decompose", help="print Pauli-Z terms of a penalized constraint")
    p.add_argument("--instance", required=True)
    p.add_argument("--constraint", type=int, required=True)
    p.add_argument("--method", default="step")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--lambda1", dest="lam1", type=float)
    p.add_argument("--lambda2", dest="lam2", type=float)
    p.add_argument("--config")
    p.set_defaults(func=cmd_decompose)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
