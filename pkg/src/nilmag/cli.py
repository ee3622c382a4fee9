"""Command line entry point: ``nilmag <subcommand> ...``.

Artifacts (CSV/JSON) go to ``--out-dir``; a run summary is printed on stdout.
Errors print ``{"error": {...}}`` on stderr and exit with the code of their
category (see ``EXIT_CODES``).
"""

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import liealg, magext, symdyn
from .chaos import LyapunovConfig, level_sample, lyapunov_spectrum, mle_benettin, sweep
from .defaults import DEFAULTS, SEED_ENV
from .errors import NilmagError, ParseError, ValidationError
from .euler import FieldSpec, IntegratorConfig, hamiltonian, integrate, write_trajectory_csv
from .orbits import T4_LABELS, OrbitSpec, casimir_observables, orbit_sample
from .scenarios import load_scenario_config

EXIT_CODES = {"parse": 2, "validation": 3, "divergence": 4, "unsupported-step": 5, "io": 6, "internal": 70}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(f"command line: {message}")


def _clean(obj):
    """JSON-safe copy: non-finite floats become null, numpy scalars become Python ones."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def resolve_seed(flag, cfg):
    """Command-line flag, then the environment, then the config, then the default."""
    if flag is not None:
        return int(flag)
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise ParseError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    if cfg.seed is not None:
        return cfg.seed
    return DEFAULTS["seed"]


def _pick(flag, cfg, section, key, default):
    if flag is not None:
        return flag
    return cfg.runs.get(section, {}).get(key, default)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"expected comma-separated numbers, got {text!r}") from None


def _is_t4(system):
    return system.algebra.labels == T4_LABELS


def initial_state(args, system, seed):
    """Field and starting covector for integrate/lyapunov.

    On the t4 extension the state is sampled on the orbit (k1, k2) and the
    geodesic field is used; elsewhere the magnetic field with strength ``c``
    at the requested energy.
    """
    meta = {}
    if _is_t4(system):
        spec = FieldSpec.geodesic(system)
        k1 = DEFAULTS["k1"] if args.k1 is None else args.k1
        k2 = DEFAULTS["k2"] if args.k2 is None else args.k2
        lam0 = None if args.state else orbit_sample(k1, k2, seed)
        if lam0 is not None:
            meta["orbit"] = OrbitSpec.from_casimirs(k1, k2).to_json()
    else:
        c = system.field_strength if args.c is None else args.c
        spec = FieldSpec.magnetic(system, c=c)
        energy = DEFAULTS["energy"] if args.energy is None else args.energy
        lam0 = None if args.state else level_sample(system.metric, energy, seed)
        meta["c"] = c
        if lam0 is not None:
            meta["energy"] = energy
    if args.state:
        lam0 = np.array(_floats(args.state))
        if lam0.shape != (system.dim,):
            raise ValidationError(f"--state needs {system.dim} coordinates")
    return spec, lam0, meta


def cmd_check(args):
    cfg, system = load_scenario_config(args.scenario)
    L = system.algebra
    jac = liealg.validate(L)
    coc = liealg.is_cocycle(L, system.sigma)
    series = liealg.lower_central_series(L)
    rows = [
        ("jacobi", jac.passed, f"residual {jac.residual}"),
        ("cocycle", coc.closed, f"residual {coc.residual}"),
        ("vanishes_on_derived", liealg.vanishes_on_derived(L, system.sigma), ""),
        ("lower_central_series", series.step is not None, "dims " + " ".join(map(str, series.dims))),
        ("step", series.step is not None, str(series.step)),
    ]
    checks = {"jacobi": jac.passed, "jacobi_residual": str(jac.residual), "cocycle": coc.closed,
              "vanishes_on_derived": rows[2][1], "series_dims": list(series.dims), "step": series.step}
    if system.lattice is not None:
        k = magext.rationality_k(system)
        rows.append(("rationality_k", True, str(k)))
        checks["rationality_k"] = k
        if not system.is_geodesic:
            rows.append(("w_generator", True, f"W/{int(1 / magext.w_step(k))}"))
    else:
        rows.append(("rationality_k", None, "no lattice"))
    checks["all_passed"] = bool(jac.passed and coc.closed and series.step is not None)
    summary = {"scenario": cfg.name or args.scenario, "config_hash": cfg.hash, "checks": checks, "outputs": []}
    if args.json:
        return summary
    width = max(len(r[0]) for r in rows)
    lines = [f"scenario {summary['scenario']}  (config sha256 {cfg.hash[:12]})"]
    for name, ok, detail in rows:
        mark = "-" if ok is None else ("ok" if ok else "FAIL")
        lines.append(f"  {name:<{width}}  {mark:<4}  {detail}".rstrip())
    sys.stdout.write("\n".join(lines) + "\n")
    return None


def cmd_extend(args):
    from .config import emit_config

    cfg, system = load_scenario_config(args.scenario)
    ext = magext.extend(system)
    lattice = None
    if system.lattice is not None:
        lattice = magext.extended_lattice(system, magext.rationality_k(system))
    name = f"{cfg.name or 'scenario'}-ext"
    text = emit_config(ext.as_system(lattice), name=name, seed=cfg.seed)
    if args.out:
        write_text(args.out, text)
        return {"scenario": cfg.name or args.scenario, "config_hash": cfg.hash,
                "checks": {"extended_dim": ext.algebra.dim}, "outputs": [args.out]}
    sys.stdout.write(text)
    return None


def cmd_integrate(args):
    cfg, system = load_scenario_config(args.scenario)
    seed = resolve_seed(args.seed, cfg)
    spec, lam0, meta = initial_state(args, system, seed)
    icfg = IntegratorConfig(
        step=_pick(args.step, cfg, "integrate", "step", DEFAULTS["step"]),
        t_end=_pick(args.t_end, cfg, "integrate", "t_end", DEFAULTS["integrate_t_end"]),
        sample_stride=int(_pick(args.stride, cfg, "integrate", "sample_stride", DEFAULTS["sample_stride"])),
    )
    metric = system.metric
    obs = {"hamiltonian": lambda s: hamiltonian(metric, s)}
    if _is_t4(system):
        obs.update(casimir_observables())
    traj = integrate(spec, lam0, icfg, obs)
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "trajectory.csv")
    json_path = os.path.join(args.out_dir, "drift.json")
    write_trajectory_csv(traj, csv_path, system.algebra.labels)
    drift = {"drifts": traj.drifts, "initial_state": list(lam0), "seed": seed, "step": icfg.step,
             "t_end": icfg.t_end, "sample_stride": icfg.sample_stride, "config_hash": cfg.hash, **meta}
    write_json(json_path, drift)
    return {"scenario": cfg.name or args.scenario, "config_hash": cfg.hash,
            "checks": {"drifts": traj.drifts}, "outputs": [csv_path, json_path]}


def _lyapunov_config(args, cfg, seed, section):
    return LyapunovConfig(
        step=_pick(args.step, cfg, section, "step", DEFAULTS["step"]),
        renorm_interval=_pick(args.renorm, cfg, section, "renorm_interval", DEFAULTS["renorm_interval"]),
        transient_fraction=cfg.runs.get(section, {}).get("transient_fraction", DEFAULTS["transient_fraction"]),
        seed=seed,
        check_convergence=not args.no_convergence,
    )


def cmd_lyapunov(args):
    cfg, system = load_scenario_config(args.scenario)
    seed = resolve_seed(args.seed, cfg)
    spec, lam0, meta = initial_state(args, system, seed)
    lcfg = _lyapunov_config(args, cfg, seed, "chaos")
    t_end = _pick(args.t_end, cfg, "chaos", "t_end", DEFAULTS["lyapunov_t_end"])
    run = lyapunov_spectrum if args.spectrum else mle_benettin
    report = run(spec, lam0, t_end, lcfg)
    os.makedirs(args.out_dir, exist_ok=True)
    path = os.path.join(args.out_dir, "lyapunov.json")
    write_json(path, {**report.to_json(), "initial_state": list(lam0), "config_hash": cfg.hash, **meta})
    return {"scenario": cfg.name or args.scenario, "config_hash": cfg.hash,
            "checks": {"mle": report.mle, "converged": report.converged}, "outputs": [path]}


def cmd_sweep(args):
    cfg, system = load_scenario_config(args.scenario)
    seed = resolve_seed(args.seed, cfg)
    seeds = list(range(seed, seed + args.n_seeds))
    if _is_t4(system):
        kind = "orbit"
        xs = _floats(args.k1) if args.k1 else [DEFAULTS["k1"]]
        ys = _floats(args.k2) if args.k2 else [DEFAULTS["k2"]]
    else:
        kind = "level"
        xs = _floats(args.c) if args.c else [system.field_strength]
        ys = _floats(args.energy) if args.energy else [DEFAULTS["energy"]]
    grid = [(x, y) for x in xs for y in ys]
    lcfg = _lyapunov_config(args, cfg, seed, "sweep")
    t_end = _pick(args.t_end, cfg, "sweep", "t_end", DEFAULTS["lyapunov_t_end"])
    table = sweep(system, grid, seeds, t_end, lcfg, kind=kind, workers=args.workers)
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "sweep.csv")
    json_path = os.path.join(args.out_dir, "sweep.json")
    write_text(csv_path, table.to_csv())
    write_json(json_path, {**table.to_json(), "config_hash": cfg.hash})
    js = table.to_json()
    return {"scenario": cfg.name or args.scenario, "config_hash": cfg.hash,
            "checks": {"mle_min": js["mle_min"], "mle_max": js["mle_max"],
                       "errors": sum(r.error is not None for r in table.rows)},
            "outputs": [csv_path, json_path]}


def cmd_sft(args):
    A = symdyn.TransitionMatrix.parse(args.matrix)
    ent = symdyn.sft_entropy(A)
    tr = symdyn.is_transitive(A)
    counts = [symdyn.count_periodic(A, p) for p in range(1, args.max_period + 1)]
    result = {
        "matrix": str(A),
        "entropy": ent.entropy,
        "empty": math.isinf(ent.entropy),
        "spectral_radius": ent.spectral_radius,
        "transitive": tr.transitive,
        "witness": tr.witness,
        "wielandt_bound": tr.bound,
        "periodic_counts": counts,
    }
    os.makedirs(args.out_dir, exist_ok=True)
    path = os.path.join(args.out_dir, "sft.json")
    write_json(path, result)
    return {"scenario": "sft", "config_hash": None, "checks": result, "outputs": [path]}


def build_parser():
    p = _Parser(prog="nilmag", description="Magnetic flows on nilmanifolds: checks, integration, chaos.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scenario_cmd(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("scenario", help="built-in name or path to a config file")
        return sp

    def run_flags(sp):
        sp.add_argument("--out-dir", default=".")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--step", type=float)
        sp.add_argument("--t-end", type=float)

    sp = scenario_cmd("check", "validate a scenario and print its structure")
    sp.add_argument("--json", action="store_true", help="print the run summary instead of the table")
    sp.set_defaults(func=cmd_check)

    sp = scenario_cmd("extend", "emit the central extension as a config")
    sp.add_argument("--out", help="write to this file instead of stdout")
    sp.set_defaults(func=cmd_extend)

    for name, func, help_text in (("integrate", cmd_integrate, "integrate the Euler field"),
                                  ("lyapunov", cmd_lyapunov, "maximal Lyapunov exponent or spectrum")):
        sp = scenario_cmd(name, help_text)
        run_flags(sp)
        sp.add_argument("--k1", type=float)
        sp.add_argument("--k2", type=float)
        sp.add_argument("--c", type=float, help="field strength (non-extension scenarios)")
        sp.add_argument("--energy", type=float)
        sp.add_argument("--state", help="explicit comma-separated initial covector")
        if name == "integrate":
            sp.add_argument("--stride", type=int)
        else:
            sp.add_argument("--renorm", type=float)
            sp.add_argument("--spectrum", action="store_true")
            sp.add_argument("--no-convergence", action="store_true", help="skip the step-halving rerun")
        sp.set_defaults(func=func)

    sp = scenario_cmd("sweep", "Benettin runs over a grid of orbits or energy levels")
    run_flags(sp)
    sp.add_argument("--k1", help="comma-separated values")
    sp.add_argument("--k2", help="comma-separated values")
    sp.add_argument("--c", help="comma-separated values")
    sp.add_argument("--energy", help="comma-separated values")
    sp.add_argument("--n-seeds", type=int, default=1)
    sp.add_argument("--renorm", type=float)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--no-convergence", action="store_true")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("sft", help="entropy, transitivity and periodic counts of a subshift")
    sp.add_argument("--matrix", required=True, help='rows of 0/1 digits, e.g. "11,10"')
    sp.add_argument("--max-period", type=int, default=8)
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_sft)
    return p


def _error_payload(category, exc):
    err = {"category": category, "message": str(exc)}
    for attr in ("line", "column", "triple", "time"):
        val = getattr(exc, attr, None)
        if val is not None:
            err[attr] = [str(x) for x in val] if attr == "triple" else val
    return {"error": err}


def main(argv=None):
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        summary = args.func(args)
    except NilmagError as exc:
        sys.stderr.write(dumps(_error_payload(exc.category, exc)))
        return EXIT_CODES.get(exc.category, 1)
    except OSError as exc:
        sys.stderr.write(dumps(_error_payload("io", exc)))
        return EXIT_CODES["io"]
    except Exception as exc:  # never a raw traceback on malformed input
        sys.stderr.write(dumps(_error_payload("internal", exc)))
        return EXIT_CODES["internal"]
    if summary is not None:
        summary["wall_time"] = time.perf_counter() - t0
        sys.stdout.write(dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
