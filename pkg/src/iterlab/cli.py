"""iterlab command line: DE runs, bound evaluation, verification, sweeps,
threshold search, finite-length simulation and EXIT-style chart sampling.

Every command reads one YAML config carrying `schema: 1`; ensembles are given
inline in the degree-map text format or through *_file paths.  Exit codes:
0 success or inapplicable bound, 1 bound violation, 2 input error.
"""

import argparse
import json
import math
import os
import sys
import tempfile

import yaml

from . import bounds as bnd
from . import de
from . import degree as deg
from . import sim as simulation

SEED_ENV = "ITERLAB_SEED"


class InputError(Exception):
    pass


def _load_config(path):
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise InputError("config must be a mapping")
    if cfg.get("schema") != 1:
        raise InputError(f"unsupported config schema {cfg.get('schema')!r}")
    return cfg


def _load_dist(section, name, base_dir):
    inline = section.get(name)
    path = section.get(f"{name}_file")
    if (inline is None) == (path is None):
        raise InputError(f"give exactly one of {name!r} or {name}_file")
    if inline is None:
        try:
            with open(os.path.join(base_dir, path)) as fh:
                inline = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
    d = deg.dist_from_text(inline)
    if isinstance(d, deg.NodeDist):
        d = deg.node_to_edge(d)
    return d


def _ensemble(cfg, base_dir):
    section = cfg.get("ensemble")
    if not isinstance(section, dict):
        raise InputError("missing ensemble section")
    kind = section.get("kind")
    if kind not in deg.KINDS:
        raise InputError(f"unknown ensemble kind {kind!r}")
    lam = _load_dist(section, "lambda", base_dir)
    rho = _load_dist(section, "rho", base_dir)
    return deg.EnsembleSpec(kind, lam, rho)


def _channel_p(cfg):
    ch = cfg.get("channel")
    if not isinstance(ch, dict) or "p" not in ch:
        raise InputError("missing channel section with erasure probability p")
    return float(ch["p"])


def _de_config(cfg):
    depart = cfg.get("de", {})
    return de.DEConfig(
        p=_channel_p(cfg),
        target_pb=float(depart.get("target_pb", 1e-8)),
        max_iter=int(depart.get("max_iter", 50_000)),
        fp_tol=float(depart.get("fp_tol", 1e-12)),
    )


def _write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".iterlab-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text):
    if args.out:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_de(args, cfg, base_dir):
    e = _ensemble(cfg, base_dir)
    decfg = _de_config(cfg)
    traj = de.de_run(e, decfg)
    if args.format == "json":
        payload = {
            "schema": 1,
            "iterations_to_target": traj.iterations_to_target,
            "terminal": traj.terminal,
            "fixed_point_target": traj.fixed_point_target,
            "states": traj.states.tolist(),
            "pb_per_iter": traj.pb_per_iter.tolist(),
        }
        _emit(args, json.dumps(payload) + "\n")
    else:
        _emit(args, de.trajectory_to_csv(traj))
    print(f"iterations_to_target: {traj.iterations_to_target}")
    print(f"terminal: {traj.terminal}")
    return 0


def cmd_bound(args, cfg, base_dir):
    section = cfg.get("bound")
    if not isinstance(section, dict):
        raise InputError("missing bound section")
    family = section.get("family")
    try:
        b = bnd.BoundInput(
            epsilon=float(section["epsilon"]),
            p=float(section["p"]),
            pb=float(section["pb"]),
            l2=float(section["l2"]),
        )
        res = bnd.bound_for(family, b)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    rec = {
        "schema": 1,
        "family": family,
        "value": res.value,
        "applicable": res.applicable,
        "precondition": res.precondition,
        "epsilon": b.epsilon,
        "p": b.p,
        "pb": b.pb,
        "l2": b.l2,
    }
    _emit(args, json.dumps(rec, sort_keys=True) + "\n")
    state = "applicable" if res.applicable else "inapplicable"
    print(f"bound: {res.value:.6g} ({state})")
    return 0


def cmd_verify(args, cfg, base_dir):
    e = _ensemble(cfg, base_dir)
    rec = bnd.verify_bound(e, _de_config(cfg))
    text = (
        bnd.record_to_csv([rec])
        if args.format == "csv"
        else bnd.record_to_json(rec) + "\n"
    )
    _emit(args, text)
    print(
        f"measured: {rec['measured_l']}  bound: {rec['bound_l']:.6g}  "
        f"status: {rec['status']}"
    )
    return 0 if rec["satisfied"] else 1


def cmd_scan(args, cfg, base_dir):
    section = cfg.get("scan")
    if not isinstance(section, dict):
        raise InputError("missing scan section")
    epsilons = section.get("epsilons") or []
    if not epsilons:
        raise InputError("empty epsilon sweep")
    rows = bnd.scaling_experiment(
        [float(x) for x in epsilons],
        target_pb=float(section.get("target_pb", 1e-6)),
        eta=float(section.get("degree2_eta", bnd.SCAN_ETA)),
        design_point=float(section.get("design_point", bnd.SCAN_DESIGN_POINT)),
        max_iter=int(section.get("max_iter", 2_000_000)),
    )
    if args.format == "json":
        _emit(args, json.dumps(rows) + "\n")
    else:
        _emit(args, bnd.record_to_csv(rows))
    ok = all(r["satisfied"] for r in rows)
    for r in rows:
        le = r["l_times_epsilon"]
        print(
            f"epsilon={r['epsilon']:.6g} measured={r['measured_l']} "
            f"bound={r['bound_l']:.6g} "
            f"l*eps={'n/a' if le is None else format(le, '.6g')} "
            f"delta={r['delta']:.6g}"
        )
    return 0 if ok else 1


def cmd_threshold(args, cfg, base_dir):
    e = _ensemble(cfg, base_dir)
    tol = float(cfg.get("threshold", {}).get("tol", 1e-3))
    try:
        pstar = de.threshold_search(e, tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    digits = max(1, int(math.ceil(-math.log10(tol))))
    if args.out:
        _emit(args, f"{pstar:.17g}\n")
    print(f"threshold: {pstar:.{digits}f}")
    return 0


def cmd_simulate(args, cfg, base_dir):
    e = _ensemble(cfg, base_dir)
    section = cfg.get("sim")
    if not isinstance(section, dict):
        raise InputError("missing sim section")
    seed = int(os.environ.get(SEED_ENV, section.get("master_seed", 0)))
    try:
        scfg = simulation.SimConfig(
            n=int(section["n"]),
            p=float(section["p"]),
            trials=int(section["trials"]),
            master_seed=seed,
            max_iter=int(section.get("max_iter", 200)),
            target_pb=float(section.get("target_pb", 0.0)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    result = simulation.simulate(e, scfg)
    decfg = de.DEConfig(
        p=scfg.p,
        target_pb=max(scfg.target_pb, 1e-300),
        max_iter=scfg.max_iter,
    )
    traj = de.de_run(e, decfg)
    report = simulation.concentration_report(
        result, traj, tol=float(section.get("concentration_tol", 0.005))
    )
    if args.out:
        _emit(args, simulation.simresult_to_csv(result))
        report_path = args.out + ".report.json"
        _write_atomic(
            report_path,
            json.dumps(
                {
                    "schema": 1,
                    "n": report.n,
                    "trials": report.trials,
                    "tol": report.tol,
                    "max_deviation": report.max_deviation,
                    "flagged_iterations": report.flagged,
                    "deviations": report.deviations.tolist(),
                    "ci_halfwidth": report.ci_halfwidth.tolist(),
                }
            )
            + "\n",
        )
    print(
        f"trials: {result.trials}  mean iterations: {result.mean_iterations:.6g}  "
        f"max |sim-DE|: {report.max_deviation:.6g}  "
        f"flagged: {len(report.flagged)}"
    )
    return 0


def cmd_exit_chart(args, cfg, base_dir):
    e = _ensemble(cfg, base_dir)
    p = _channel_p(cfg)
    samples = int(cfg.get("chart", {}).get("samples", 512))
    if e.kind == deg.LDPC:
        curves = de.condition_curves(e.lam, e.rho, p, samples)
        x, c, v = curves.x, curves.c, curves.v
    else:
        import numpy as np

        t = de.TiltedEnsemble(e, p)
        x = np.linspace(0.0, 1.0, samples)
        c = np.array([1.0 - t.rho_t(1.0 - xi) for xi in x])
        v = np.array([de.inverse_monotone(t.lambda_t, xi, tol=1e-13) for xi in x])
    if args.format == "json":
        _emit(
            args,
            json.dumps(
                {"schema": 1, "x": x.tolist(), "c": c.tolist(), "v": v.tolist()}
            )
            + "\n",
        )
    else:
        lines = ["x,c,v"]
        for xi, ci, vi in zip(x, c, v):
            lines.append(f"{xi:.17g},{ci:.17g},{vi:.17g}")
        _emit(args, "\n".join(lines) + "\n")
    gap = min(v[1:] - c[1:])  # both curves vanish at x = 0
    print(f"sampled {samples} points, min(v-c) on (0,1] = {gap:.6g}")
    return 0


COMMANDS = {
    "de": cmd_de,
    "bound": cmd_bound,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "threshold": cmd_threshold,
    "simulate": cmd_simulate,
    "exit-chart": cmd_exit_chart,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="iterlab",
        description="density evolution, iteration bounds and finite-length "
        "simulation for code ensembles on the BEC",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="YAML config file")
    parser.add_argument("--out", help="output file (atomically replaced)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        base_dir = os.path.dirname(os.path.abspath(args.config))
        return COMMANDS[args.command](args, cfg, base_dir)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
