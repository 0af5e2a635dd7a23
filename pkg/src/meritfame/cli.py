"""
Command-line entry point.

    meritfame simulate CONFIG [--out DIR] [--t-max N] [--seed S] [--replicas R]
    meritfame analytic CONFIG [--theta T ...] [--q-max Q] [--kl-max K] [--out DIR]
    meritfame compare  CONFIG [--out DIR] [--t-max N] [--seed S] [--tol KEY=VALUE ...]
    meritfame selfcheck [--terms N]

Exit codes: 0 pass, 1 check failed, 2 usage or config error, 3 some
comparison checks could not be evaluated (and none failed).
"""
import argparse
import csv
import datetime
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, fields

import numpy as np

from . import __version__
from .analytics import joint_table, total_degree_table, write_table_rows
from .checks import selfcheck_rows
from .errors import ConfigError
from .model import load_params, params_to_dict
from .simulator import grow, make_rng, write_edges, write_nodes
from .stats import Tolerances, compare, empirical_from_graph

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NOT_EVALUABLE = 0, 1, 2, 3
OUT_ENV = "MERITFAME_OUT"


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _load(args):
    params = load_params(args.config)
    changes = {}
    if getattr(args, "t_max", None) is not None:
        changes["t_max"] = args.t_max
    if getattr(args, "seed", None) is not None:
        changes["rng_seed"] = args.seed
    return params.replace(**changes) if changes else params


def _out_dir(args):
    out = args.out or os.environ.get(OUT_ENV) or "out"
    os.makedirs(out, exist_ok=True)
    return out


def write_manifest(out, command, params, outputs, started):
    manifest = {
        "command": command,
        "version": __version__,
        "config": params_to_dict(params),
        "rng_seed": params.rng_seed,
        "started": started,
        "finished": _now(),
        "outputs": {name: {"path": os.path.relpath(p, out), "sha256": _sha256(p)} for name, p in outputs.items()},
    }
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def _replica_rng(seed, index, count):
    if count == 1:
        return make_rng(seed)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed).spawn(count)[index]))


def _run_replica(params, index, count, directory):
    os.makedirs(directory, exist_ok=True)
    graph = grow(params, _replica_rng(params.rng_seed, index, count))
    edges = os.path.join(directory, "edges.tsv")
    nodes = os.path.join(directory, "nodes.csv")
    write_edges(graph, edges)
    write_nodes(graph, nodes)
    return edges, nodes


def cmd_simulate(args):
    params = _load(args)
    out = _out_dir(args)
    started = _now()
    r = args.replicas
    if r < 1:
        raise ConfigError(f"--replicas must be >= 1, got {r}")
    outputs = {}
    if r == 1:
        edges, nodes = _run_replica(params, 0, 1, out)
        outputs = {"edges": edges, "nodes": nodes}
    else:
        dirs = [os.path.join(out, f"replica_{i:03d}") for i in range(r)]
        workers = min(r, args.jobs or os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_replica, params, i, r, d) for i, d in enumerate(dirs)]
            for i, fut in enumerate(futures):
                edges, nodes = fut.result()
                outputs[f"replica_{i:03d}/edges"] = edges
                outputs[f"replica_{i:03d}/nodes"] = nodes
    write_manifest(out, "simulate", params, outputs, started)
    print(f"wrote {len(outputs)} files to {out}")
    return EXIT_PASS


def _default_thetas(params, limit=100):
    return [float(t) for t in params.fitness.support(1 - 1e-4)[:limit]]


def cmd_analytic(args):
    params = _load(args)
    out = _out_dir(args)
    started = _now()
    thetas = args.theta if args.theta else _default_thetas(params)
    kl_max = min(args.kl_max, args.q_max)
    joint_path = os.path.join(out, "analytic_joint.csv")
    total_path = os.path.join(out, "analytic_total.csv")
    with open(joint_path, "w", newline="") as fj, open(total_path, "w", newline="") as ft:
        wj = csv.writer(fj, lineterminator="\n")
        wt = csv.writer(ft, lineterminator="\n")
        for i, th in enumerate(thetas):
            write_table_rows(wj, [joint_table(kl_max, kl_max, th, params)], header=(i == 0))
            write_table_rows(wt, [total_degree_table(args.q_max, th, params)], header=(i == 0))
    write_manifest(out, "analytic", params, {"joint": joint_path, "total": total_path}, started)
    print(f"wrote analytic tables for {len(thetas)} fitness values to {out}")
    return EXIT_PASS


def _parse_tolerances(items):
    names = {f.name: f.type for f in fields(Tolerances)}
    changes = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or key not in names:
            raise ConfigError(f"bad --tol {item!r}; keys: {', '.join(names)}")
        try:
            changes[key] = int(value) if names[key] in (int, "int") else float(value)
        except ValueError:
            raise ConfigError(f"bad --tol value {item!r}") from None
    return Tolerances(**changes)


def cmd_compare(args):
    params = _load(args)
    tol = _parse_tolerances(args.tol)
    out = _out_dir(args)
    started = _now()
    t0 = time.perf_counter()
    graph = grow(params)
    emp_all = empirical_from_graph(graph, params)
    emp_cens = empirical_from_graph(graph, params, censor_fraction=tol.censor_fraction)
    report = compare(params, emp_all, emp_cens, tol)
    report.notes.append(f"simulation + analysis took {time.perf_counter() - t0:.1f}s")
    report_path = os.path.join(out, "report.json")
    report.to_json(report_path)
    write_manifest(out, "compare", params, {"report": report_path}, started)
    print(report.format_table())
    if report.failed:
        return EXIT_FAIL
    if not report.evaluable:
        return EXIT_NOT_EVALUABLE
    return EXIT_PASS


def cmd_selfcheck(args):
    rows = selfcheck_rows(args.terms)
    print(f"{'check':<32}{'max deviation':>16}{'tolerance':>12}  result")
    for r in rows:
        print(f"{r.name:<32}{r.deviation:>16.3e}{r.tolerance:>12.0e}  {'PASS' if r.ok else 'FAIL'}")
    return EXIT_PASS if all(r.ok for r in rows) else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="meritfame", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, sim=True):
        sp.add_argument("config", help="JSON experiment config")
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./out)")
        if sim:
            sp.add_argument("--t-max", type=int, help="override number of arrivals")
            sp.add_argument("--seed", type=int, help="override rng seed")

    sp = sub.add_parser("simulate", help="grow the network and write edges.tsv / nodes.csv")
    common(sp)
    sp.add_argument("--replicas", type=int, default=1, help="independent seeded replicas")
    sp.add_argument("--jobs", type=int, help="worker processes for replicas")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("analytic", help="write closed-form joint and total-degree tables")
    common(sp, sim=False)
    sp.add_argument("--theta", type=float, nargs="+", help="fitness values (default: bulk of the support)")
    sp.add_argument("--q-max", type=int, default=200)
    sp.add_argument("--kl-max", type=int, default=100, help="per-axis size of the joint (k, ell) grid")
    sp.set_defaults(func=cmd_analytic)

    sp = sub.add_parser("compare", help="simulate and check against the closed forms")
    common(sp)
    sp.add_argument("--tol", action="append", metavar="KEY=VALUE", help="override a tolerance")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("selfcheck", help="numerical identity and oracle checks")
    sp.add_argument("--terms", type=int, default=10 ** 6, help="explicit terms in each partial sum")
    sp.set_defaults(func=cmd_selfcheck)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_PASS
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
