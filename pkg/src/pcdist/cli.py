"""Command-line interface.

Exit codes: 0 on success or Accept, 1 on Reject, 2 on runtime errors
(unreadable input, structural violations, ...), 64 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import benchgen, oracle
from .circuit import (
    CapabilityError,
    Circuit,
    StructuralError,
    check_deterministic,
    structural_report,
)
from .closeness import TeqParams, peq, teq, tv_bound_report
from .engine import UnsatisfiableError, netpoly_eval, sample_many, wmc_exact
from .formats import (
    ParseError,
    parse_dimacs_cnf,
    parse_nnf,
    parse_weights,
    write_dimacs_cnf,
    write_nnf,
    write_weights,
)
from .weights import WeightFn, dyadic_approx, weighted_to_unweighted

EXIT_OK, EXIT_REJECT, EXIT_ERROR, EXIT_USAGE = 0, 1, 2, 64
TIME_FIELDS = ("seconds",)
CSV_COLUMNS = ("benchmark", "eps", "eta", "dtv", "result", "seconds")
_INPUT_ARGS = ("circuit", "weights", "circuit1", "weights1", "circuit2", "weights2", "cnf")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _num(x: Fraction) -> dict:
    return {"exact": _q(x), "approx": float(x)}


def _read_circuit(path: str) -> Circuit:
    return parse_nnf(Path(path).read_bytes())


def _read_weights(path: str | None, n: int) -> WeightFn:
    if path is None:
        return WeightFn.uniform(n)
    return parse_weights(Path(path).read_bytes(), n)


def _rng(args) -> tuple[random.Random, int]:
    seed = args.seed if args.seed is not None else random.SystemRandom().getrandbits(64)
    return random.Random(seed), seed


# -- subcommands: each returns (record, exit code) -------------------------


def cmd_count(args):
    c = _read_circuit(args.circuit)
    w = _read_weights(args.weights, c.n_vars)
    value = wmc_exact(c, w)
    return {"wmc": _num(value)}, EXIT_OK


def cmd_sample(args):
    c = _read_circuit(args.circuit)
    w = _read_weights(args.weights, c.n_vars)
    rng, seed = _rng(args)
    draws = sample_many(c, w, args.count, rng)
    return {"seed": seed, "samples": ["".join(map(str, row)) for row in draws.tolist()]}, EXIT_OK


def _pair(args):
    c1 = _read_circuit(args.circuit1)
    w1 = _read_weights(args.weights1, c1.n_vars)
    c2 = _read_circuit(args.circuit2)
    w2 = _read_weights(args.weights2, c2.n_vars)
    if getattr(args, "swap", False):
        c1, w1, c2, w2 = c2, w2, c1, w1
    return c1, w1, c2, w2


def cmd_tv_exact(args):
    c1, w1, c2, w2 = _pair(args)
    return {"dtv": _num(oracle.tv_exact(c1, w1, c2, w2, limit=args.limit))}, EXIT_OK


def cmd_teq(args):
    c1, w1, c2, w2 = _pair(args)
    params = TeqParams(args.eps, args.eta, args.delta, args.mode)
    rng, seed = _rng(args)
    verdict, trace = teq(c1, w1, c2, w2, params, rng, noise=args.noise, threads=args.threads)
    report = tv_bound_report(trace, params)
    record = {
        "seed": seed,
        "params": {"eps": _q(params.eps), "eta": _q(params.eta), "delta": _q(params.delta), "mode": params.mode},
        "result": verdict.decision.value,
        "statistic": _num(verdict.statistic),
        "threshold": _num(verdict.threshold),
        "estimate": _num(report["estimate"]),
        "m": verdict.m,
        "skipped": verdict.skipped,
        "noise": args.noise,
        "swap": args.swap,
    }
    if args.dtv:
        record["dtv"] = _num(oracle.tv_exact(c1, w1, c2, w2))
    return record, EXIT_OK if verdict.accepted else EXIT_REJECT


def cmd_peq(args):
    c1, w1, c2, w2 = _pair(args)
    rng, seed = _rng(args)
    verdict = peq(c1, w1, c2, w2, args.delta, rng)
    record = {
        "seed": seed,
        "params": {"delta": _q(args.delta)},
        "result": verdict.decision.value,
        "m": verdict.m,
        "theta": list(verdict.witness),
        "difference": _num(verdict.statistic),
    }
    return record, EXIT_OK if verdict.accepted else EXIT_REJECT


def cmd_gen(args):
    rng, seed = _rng(args)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    target = benchgen.Target.parse(args.target) if args.target else None
    pairs = []
    for k in range(args.count):
        cnf, circuit, w1 = benchgen.random_instance(args.vars, rng, ratio=args.ratio, precision=args.precision)
        stem = f"{args.prefix}{args.vars}_{k}"
        (out / f"{stem}.cnf").write_text(write_dimacs_cnf(cnf))
        (out / f"{stem}.nnf").write_text(write_nnf(circuit))
        (out / f"{stem}.w1").write_text(write_weights(w1))
        entry = {"benchmark": stem, "cnf": f"{stem}.cnf", "nnf": f"{stem}.nnf", "weights1": f"{stem}.w1"}
        if target is not None:
            try:
                pair = benchgen.make_pair_with_target(circuit, w1, target, rng)
            except benchgen.InfeasibleTarget as exc:
                entry["infeasible"] = str(exc)
            else:
                (out / f"{stem}.w2").write_text(write_weights(pair.w2))
                entry.update(weights2=f"{stem}.w2", var=pair.var, dtv=_num(pair.dtv_closed_form))
            entry["target"] = {"kind": target.kind, "bound": _q(target.bound)}
        pairs.append(entry)
    manifest = {"seed": seed, "vars": args.vars, "ratio": args.ratio, "precision": args.precision, "pairs": pairs}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return {"seed": seed, "outdir": str(out), "pairs": pairs}, EXIT_OK


def cmd_compile(args):
    cnf = parse_dimacs_cnf(Path(args.cnf).read_bytes())
    circuit = benchgen.compile_decision_dnnf(cnf)
    text = write_nnf(circuit)
    if args.output:
        Path(args.output).write_text(text)
    record = {"nodes": len(circuit.nodes), "edges": circuit.n_edges, "vars": circuit.n_vars}
    if not args.output:
        record["nnf"] = text
    return record, EXIT_OK


def cmd_check(args):
    c = _read_circuit(args.circuit)
    report = structural_report(c)
    record = {
        "decomposable": report.decomposable,
        "deterministic": report.deterministic.value,
        "smooth": report.smooth,
        "nodes": len(c.nodes),
        "edges": c.n_edges,
        "vars": c.n_vars,
    }
    if args.semantic:
        record["semantic_deterministic"] = check_deterministic(c, "semantic")
    return record, EXIT_OK


def cmd_reduce(args):
    c = _read_circuit(args.circuit)
    w = _read_weights(args.weights, c.n_vars)
    dyadic = dyadic_approx(w, args.precision)
    out = weighted_to_unweighted(c, dyadic, decision_form=args.decision_form)
    text = write_nnf(out)
    if args.output:
        Path(args.output).write_text(text)
    record = {
        "vars": out.n_vars,
        "nodes": len(out.nodes),
        "precision": args.precision,
        "max_rel_error": _num(dyadic.max_rel_error),
    }
    if not args.output:
        record["nnf"] = text
    return record, EXIT_OK


def cmd_netpoly(args):
    c = _read_circuit(args.circuit)
    w = _read_weights(args.weights, c.n_vars)
    try:
        theta = tuple(int(t) for t in args.theta.split(","))
    except ValueError:
        raise UsageError(f"--theta must be comma-separated integers, got {args.theta!r}") from None
    if len(theta) != c.n_vars:
        raise UsageError(f"--theta has {len(theta)} entries, circuit has {c.n_vars} variables")
    return {"theta": list(theta), "value": _num(netpoly_eval(c, w, theta))}, EXIT_OK


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="RNG seed (an auto-chosen seed is reported when omitted)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--mode", choices=("experiment", "conservative"), default="experiment")
    common.add_argument("--swap", action="store_true", help="sample from the second circuit instead of the first")
    common.add_argument("--threads", type=int, default=1)

    parser = _Parser(prog="pcdist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("count", cmd_count, "weighted model count")
    p.add_argument("circuit")
    p.add_argument("weights", nargs="?")

    p = add("sample", cmd_sample, "draw weighted samples")
    p.add_argument("circuit")
    p.add_argument("weights", nargs="?")
    p.add_argument("-N", "--count", type=int, default=10)

    def pair_args(p):
        p.add_argument("circuit1")
        p.add_argument("weights1")
        p.add_argument("circuit2")
        p.add_argument("weights2")

    p = add("tv-exact", cmd_tv_exact, "exact total variation distance by enumeration")
    pair_args(p)
    p.add_argument("--limit", type=int, default=oracle.ENUMERATION_LIMIT, help="override the variable-count guard")

    p = add("teq", cmd_teq, "closeness test")
    pair_args(p)
    p.add_argument("-e", "--eps", type=_rational, required=True)
    p.add_argument("-n", "--eta", type=_rational, required=True)
    p.add_argument("-d", "--delta", type=_rational, required=True)
    p.add_argument("--noise", action="store_true", help="use noisy counting/sampling oracles")
    p.add_argument("--dtv", action="store_true", help="also report the exact distance (enumeration)")
    p.add_argument("--benchmark", default="", help="name used in the CSV row")

    p = add("peq", cmd_peq, "equivalence test")
    pair_args(p)
    p.add_argument("-d", "--delta", type=_rational, required=True)

    p = add("gen", cmd_gen, "generate random instances and perturbation pairs")
    p.add_argument("outdir")
    p.add_argument("--vars", type=int, default=14)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--ratio", type=float, default=benchgen.DEFAULT_RATIO)
    p.add_argument("--precision", type=int, default=8)
    p.add_argument("--target", help="close=<eps> or far=<eta>")
    p.add_argument("--prefix", default="")

    p = add("compile", cmd_compile, "compile DIMACS CNF to decision-DNNF")
    p.add_argument("cnf")
    p.add_argument("-o", "--output")

    p = add("check", cmd_check, "structural report")
    p.add_argument("circuit")
    p.add_argument("--semantic", action="store_true")

    p = add("reduce", cmd_reduce, "weighted to unweighted reduction")
    p.add_argument("circuit")
    p.add_argument("weights", nargs="?")
    p.add_argument("-p", "--precision", type=int, default=16)
    p.add_argument("--decision-form", action="store_true")
    p.add_argument("-o", "--output")

    p = add("netpoly", cmd_netpoly, "evaluate the network polynomial")
    p.add_argument("circuit")
    p.add_argument("weights", nargs="?")
    p.add_argument("--theta", required=True, help="comma-separated integers")
    return parser


def _emit(record: dict, args, out) -> None:
    if args.format == "json":
        out.write(json.dumps(record, sort_keys=True) + "\n")
    elif args.format == "csv":
        buf = io.StringIO()
        if args.command == "teq":
            writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
            writer.writeheader()
            dtv = record.get("dtv", {}).get("approx", "")
            writer.writerow(
                {
                    "benchmark": args.benchmark,
                    "eps": float(args.eps),
                    "eta": float(args.eta),
                    "dtv": dtv,
                    "result": record["result"][0],
                    "seconds": f"{record['seconds']:.3f}",
                }
            )
        else:
            flat = {k: (v["exact"] if isinstance(v, dict) and "exact" in v else v) for k, v in record.items()}
            flat = {k: v for k, v in flat.items() if not isinstance(v, (list, dict))}
            writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
            writer.writeheader()
            writer.writerow(flat)
        out.write(buf.getvalue())
    else:
        for key, value in record.items():
            if isinstance(value, dict) and "exact" in value:
                value = f"{value['exact']} (~{value['approx']:.6g})"
            elif isinstance(value, list) and key == "samples":
                value = "\n  " + "\n  ".join(value)
            out.write(f"{key}: {value}\n")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    start = time.perf_counter()
    try:
        record, code = args.func(args)
    except UsageError as exc:
        print(f"pcdist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ParseError, StructuralError, CapabilityError, UnsatisfiableError, ValueError) as exc:
        print(f"pcdist: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    inputs = [getattr(args, k) for k in _INPUT_ARGS if getattr(args, k, None)]
    record = {"subcommand": args.command, "inputs": inputs, **record, "seconds": time.perf_counter() - start}
    _emit(record, args, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
