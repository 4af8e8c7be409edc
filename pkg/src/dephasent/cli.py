"""``dephasent`` command line: bounds, verify, sweep and oracle-compare.

Exit codes: 0 success, 2 usage or schema error, 3 a chain inequality or
oracle verdict failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from ._validation import ValidationError
from .bounds import POVM_STRATEGIES, Tolerances, evaluate_instance
from .dynamics import INSTANCE_KINDS, evolve, random_instance
from .info import Povm
from .ree import is_ppt
from .serialization import SCHEMA_VERSION, load_instance, reports_to_csv, reports_to_json, sweep_to_csv
from .spinboson import (
    CONVENTIONS,
    SpinBosonParams,
    TruncationError,
    analytic_fidelity,
    bound_curve,
    detect_peak,
    oracle_fidelity,
    sample_bath,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 2, 3

DEFAULT_DIMS = "2x2,2x3,2x4,3x2,3x3,3x4"
VERIFY_POVM = {"restarts": 2, "max_iters": 200}
VERIFY_REE = {"restarts": 1, "max_iter": 100}
CHAIN_NAMES = (
    "lower_general<=S_E-S_SE",
    "lower_qubit<=lower_general",
    "neg_cond_entropy<=mutual_info",
    "mutual_info<=upper",
    "pure:lower<=S_S<=upper",
    "diagonal:no_entanglement",
)
EXTRA_NAMES = (
    "ree_low<=ree_high",
    "lower_general<=ree_high",
    "ree_high<=mutual_info",
    "ppt_2x2:ree_high~0",
    "classical_mi<=holevo_chi",
)

PRESETS = {
    "alpha-scan": {"temps": [1.0], "alphas": [0.0, 0.25, 0.5, 0.75, 1.0], "s": [2.0, 3.0]},
    "temperature-scan": {"temps": [0.5, 1.0, 2.0], "alphas": [0.5], "s": [2.0, 3.0]},
}


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def parse_dims(text):
    out = []
    for tok in text.split(","):
        try:
            a, b = tok.lower().split("x")
            out.append((int(a), int(b)))
        except ValueError as exc:
            raise UsageError(f"dims entries look like 2x3, got {tok!r}") from exc
        if out[-1][0] < 2 or out[-1][1] < 1 or out[-1][0] * out[-1][1] > 36:
            raise UsageError(f"unsupported dimensions {tok!r}")
    return out


def parse_tolerances(items):
    tol = Tolerances()
    for item in items or []:
        key, _, val = item.partition("=")
        if key not in Tolerances.__dataclass_fields__:
            raise UsageError(f"unknown tolerance {key!r}; choose from {sorted(Tolerances.__dataclass_fields__)}")
        try:
            tol = replace(tol, **{key: float(val)})
        except (ValueError, ValidationError) as exc:
            raise UsageError(f"bad tolerance {item!r}: {exc}") from exc
    return tol


def _write(path, text):
    if path is None or str(path) == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text)


def _side_path(output, suffix):
    if output is None or str(output) == "-":
        return None
    p = Path(output)
    return p.with_name(p.stem + suffix)


# -- bounds -----------------------------------------------------------------------


def cmd_bounds(args) -> int:
    inst = load_instance(args.input)
    tol = parse_tolerances(args.tolerance)
    strategy = args.povm_strategy or ("fixed" if inst.povm is not None else "optimize")
    povm = Povm(tuple(inst.povm)) if inst.povm is not None else None
    reports = [
        evaluate_instance(inst.model, inst.rho_S, inst.rho_E, t, strategy, povm,
                          {"seed": args.seed}, True, {"seed": args.seed}, tol)
        for t in inst.times
    ]
    _write(args.output, reports_to_json(reports))
    side = _side_path(args.output, ".csv")
    if side is not None:
        side.write_text(reports_to_csv(reports))
    return EXIT_OK if all(r.all_ok for r in reports) else EXIT_FAIL


# -- verify -----------------------------------------------------------------------


def verify_one(job):
    """Evaluate one random instance; returns ``(index, kind, dims, chain verdicts, extra verdicts)``."""
    seed, index, (d_s, d_e), tol = job
    rng = np.random.default_rng([seed, index])
    kind = INSTANCE_KINDS[index % len(INSTANCE_KINDS)]
    inst = random_instance(d_s, d_e, rng, kind=kind)
    t = inst.times[0]
    rep = evaluate_instance(inst.model, inst.rho_S, inst.rho_E, t, "optimize",
                            povm_params=dict(VERIFY_POVM, seed=seed), ree_params=dict(VERIFY_REE, seed=seed),
                            tolerances=tol)
    extra = [
        bool(rep.ree_bracket_low <= rep.ree_bracket_high + tol.separable),
        bool(rep.lower_general <= rep.ree_bracket_high + tol.bracket),
        bool(rep.ree_bracket_high <= rep.mutual_info + tol.bracket),
        None,
        bool(rep.H_I - rep.H_I_given_M <= rep.holevo_chi + tol.analytic),
    ]
    if (d_s, d_e) == (2, 2):
        sigma = evolve(inst.model, inst.rho_S, inst.rho_E, t)
        if is_ppt(sigma)[0]:
            extra[3] = bool(rep.ree_bracket_high <= tol.bracket)
    return index, kind, (d_s, d_e), list(rep.chain_ok), extra


def run_verify(count, dims, seed=0, tolerances=None, parallelism=1):
    """Run the randomized chain suite and return a JSON-ready summary."""
    if count < 1:
        raise UsageError("count must be at least 1")
    tol = tolerances or Tolerances()
    jobs = [(seed, i, dims[i % len(dims)], tol) for i in range(count)]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as ex:
            results = list(ex.map(verify_one, jobs, chunksize=8))
    else:
        results = [verify_one(j) for j in jobs]

    def tally(names, pick):
        out = {}
        for k, name in enumerate(names):
            vals = [pick(r)[k] for r in results]
            out[name] = {
                "pass": sum(v is True for v in vals),
                "fail": sum(v is False for v in vals),
                "not_applicable": sum(v is None for v in vals),
            }
        return out

    chain = tally(CHAIN_NAMES, lambda r: r[3])
    extra = tally(EXTRA_NAMES, lambda r: r[4])
    failures = [
        {"index": r[0], "kind": r[1], "dims": list(r[2]),
         "chain": [n for n, v in zip(CHAIN_NAMES, r[3]) if v is False],
         "extra": [n for n, v in zip(EXTRA_NAMES, r[4]) if v is False]}
        for r in results if False in r[3] or False in r[4]
    ]
    return {
        "schema_version": SCHEMA_VERSION,
        "count": count,
        "dims": [list(d) for d in dims],
        "seed": seed,
        "tolerances": tol.__dict__,
        "povm_search": VERIFY_POVM,
        "ree_search": VERIFY_REE,
        "chain": chain,
        "extra": extra,
        "failures": failures,
        "all_pass": not failures,
    }


def cmd_verify(args) -> int:
    summary = run_verify(args.count, parse_dims(args.dims), args.seed, parse_tolerances(args.tolerance), args.parallelism)
    _write(args.output, json.dumps(summary, indent=1, sort_keys=True))
    return EXIT_OK if summary["all_pass"] else EXIT_FAIL


# -- sweep ------------------------------------------------------------------------


def run_sweep(s_values, temps, alphas, times, convention="reference", best_effort=False):
    rows, peaks = [], []
    for s in s_values:
        for r in temps:
            for a in alphas:
                p = SpinBosonParams(s, 1.0, r, a, tuple(times))
                c = bound_curve(p, convention, best_effort)
                for k in range(len(c.lambda_t)):
                    rows.append((s, r, a, c.lambda_t[k], c.b_vac[k], c.b_th[k], c.b[k], c.raw[k], c.clamped[k]))
                pk = detect_peak(c.lambda_t, c.clamped)
                peaks.append({
                    "s": s, "T_over_Lambda": r, "alpha": a,
                    "peak_Lambda_t": None if pk is None else pk[0],
                    "prominence": None if pk is None else pk[1],
                    "final_clamped": float(c.clamped[-1]),
                })
    return rows, peaks


def cmd_sweep(args) -> int:
    cfg = dict(PRESETS[args.preset]) if args.preset else {"temps": [1.0], "alphas": [0.0], "s": [3.0]}
    if args.s:
        cfg["s"] = _floats(args.s)
    if args.temps:
        cfg["temps"] = _floats(args.temps)
    if args.alphas:
        cfg["alphas"] = _floats(args.alphas)
    if args.t_step <= 0 or args.t_max < 0:
        raise UsageError("t-step must be positive and t-max nonnegative")
    times = np.round(np.arange(0.0, args.t_max + 0.5 * args.t_step, args.t_step), 12)
    rows, peaks = run_sweep(cfg["s"], cfg["temps"], cfg["alphas"], times, args.convention, args.best_effort_s)
    _write(args.output, sweep_to_csv(rows))
    side = _side_path(args.output, ".peaks.json")
    payload = json.dumps({"schema_version": SCHEMA_VERSION, "convention": args.convention, "peaks": peaks}, indent=1)
    if side is None:
        sys.stderr.write(payload + "\n")
    else:
        side.write_text(payload)
    return EXIT_OK


# -- oracle-compare -----------------------------------------------------------------


def run_oracle_compare(s, t_over_lambda, n_modes=500, omega_max=30.0, times=None, convention="reference",
                       best_effort=False, seed=None, tolerance=1e-2):
    times = np.arange(0.0, 5.0 + 1e-9, 0.25) if times is None else np.asarray(times, dtype=float)
    p = SpinBosonParams(s, 1.0, t_over_lambda, 0.0, tuple(times))
    analytic = analytic_fidelity(times, p, convention, best_effort)
    bath = sample_bath(p, n_modes, omega_max, seed)
    oracle = oracle_fidelity(bath, times, t_over_lambda)
    rel = np.abs(analytic - oracle) / oracle
    return {
        "lambda_t": times, "analytic": analytic, "oracle": oracle, "rel_error": rel,
        "max_rel_error": float(rel.max()), "pass": bool(rel.max() <= tolerance),
    }


def cmd_oracle_compare(args) -> int:
    tol = 1e-2
    for item in args.tolerance or []:
        key, _, val = item.partition("=")
        if key != "oracle":
            raise UsageError("oracle-compare accepts only --tolerance oracle=<value>")
        tol = float(val)
    times = np.round(np.arange(0.0, args.t_max + 0.5 * args.t_step, args.t_step), 12)
    try:
        res = run_oracle_compare(args.s, args.temperature, args.modes, args.omega_max, times,
                                 args.convention, args.best_effort_s, args.seed if args.jitter else None, tol)
    except TruncationError as exc:
        sys.stderr.write(f"Fock truncation did not converge: {exc}\n")
        return EXIT_FAIL
    buf = io.StringIO()
    buf.write(f"# schema_version={SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Lambda_t", "B_analytic", "B_oracle", "rel_error"])
    for row in zip(res["lambda_t"], res["analytic"], res["oracle"], res["rel_error"]):
        w.writerow([repr(float(v)) for v in row])
    _write(args.output, buf.getvalue())
    verdict = json.dumps({"schema_version": SCHEMA_VERSION, "s": args.s, "T_over_Lambda": args.temperature,
                          "modes": args.modes, "omega_max": args.omega_max, "convention": args.convention,
                          "max_rel_error": res["max_rel_error"], "tolerance": tol, "pass": res["pass"]}, indent=1)
    side = _side_path(args.output, ".verdict.json")
    if side is None:
        sys.stderr.write(verdict + "\n")
    else:
        side.write_text(verdict)
    return EXIT_OK if res["pass"] else EXIT_FAIL


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", default="-", help="output file ('-' for stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--parallelism", type=int, default=1)
    common.add_argument("--tolerance", action="append", metavar="NAME=VALUE", help="override a tolerance")

    ap = argparse.ArgumentParser(prog="dephasent", description="Entanglement bounds for pure-dephasing dynamics.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", parents=[common], help="evaluate every bound for one JSON instance")
    b.add_argument("--input", required=True)
    b.add_argument("--povm-strategy", choices=POVM_STRATEGIES)

    v = sub.add_parser("verify", parents=[common], help="randomized chain-inequality suite")
    v.add_argument("--count", type=int, default=1000)
    v.add_argument("--dims", default=DEFAULT_DIMS, help="comma-separated d_SxD_E pairs")

    s = sub.add_parser("sweep", parents=[common], help="spin-boson bound curves as CSV")
    s.add_argument("--preset", choices=sorted(PRESETS))
    s.add_argument("--s", help="comma-separated Ohmicities")
    s.add_argument("--temps", help="comma-separated T/Lambda values")
    s.add_argument("--alphas", help="comma-separated mixedness values")
    s.add_argument("--t-max", type=float, default=10.0)
    s.add_argument("--t-step", type=float, default=0.05)
    s.add_argument("--convention", choices=CONVENTIONS, default="reference")
    s.add_argument("--best-effort-s", action="store_true")

    o = sub.add_parser("oracle-compare", parents=[common], help="closed form versus discrete-mode oracle")
    o.add_argument("--s", type=float, default=3.0)
    o.add_argument("--temperature", type=float, default=1.0, help="T/Lambda")
    o.add_argument("--modes", type=int, default=500)
    o.add_argument("--omega-max", type=float, default=30.0, help="in units of Lambda")
    o.add_argument("--t-max", type=float, default=5.0)
    o.add_argument("--t-step", type=float, default=0.25)
    o.add_argument("--convention", choices=CONVENTIONS, default="reference")
    o.add_argument("--best-effort-s", action="store_true")
    o.add_argument("--jitter", action="store_true", help="jitter mode frequencies within their cells using --seed")
    return ap


COMMANDS = {"bounds": cmd_bounds, "verify": cmd_verify, "sweep": cmd_sweep, "oracle-compare": cmd_oracle_compare}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValidationError, OSError) as exc:
        sys.stderr.write(f"dephasent {args.command}: {exc}\n")
        return EXIT_USAGE
    except ArithmeticError as exc:
        sys.stderr.write(f"dephasent {args.command}: numerical sanity check failed: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
