"""Command-line interface: sample | estimate | verify | bench.

Exit codes: 0 success (or verification pass), 2 usage error, 3 data error,
4 resource-cap error, 5 verification failure.  Every sampling command
requires --seed and is byte-deterministic in its flags; numeric CSV output
uses 17 significant digits so values round-trip exactly.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from ._rng import derive_rng
from .errors import DataError, DomainError, MatchgateShadowsError, NumericError, ResourceError
from .givens import circuit_to_json, greedy_depth
from .sampling import ENSEMBLES, sample_circuit
from .shadows import (
    BenchConfig,
    bench_rows_to_csv,
    collect_batch,
    estimate,
    lambda_eigenvalue,
    variance_experiment,
)
from .statevec import load_state
from .twirl import (
    check_3design,
    clifford_point_density,
    gamma_4fold,
    uniform_angle_density,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_RESOURCE = 4
EXIT_VERIFY_FAIL = 5


def _open_out(path: str | None):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w"), True


def cmd_sample(args) -> int:
    out, close = _open_out(args.out)
    try:
        rng = derive_rng(args.seed, "cli-sample", args.ensemble)
        for _ in range(args.shots):
            seq = sample_circuit(args.ensemble, args.n, rng)
            doc = circuit_to_json(seq)
            if args.ensemble == "optimal":
                doc["gate_count"] = seq.gate_count
                doc["depth"] = greedy_depth([r.axis for r in seq.rotations])
            out.write(json.dumps(doc) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def _read_observables(path: str) -> list[tuple[int, ...]]:
    observables = []
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DataError(f"cannot read observables file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            indices = tuple(int(tok) for tok in text.split())
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: not a list of integers: {text!r}") from exc
        if len(indices) % 2:
            raise DataError(
                f"{path}:{lineno}: odd-degree monomial {text!r} has no unbiased estimator"
            )
        if any(a >= b for a, b in zip(indices, indices[1:])):
            raise DataError(f"{path}:{lineno}: indices must be strictly increasing: {text!r}")
        observables.append(indices)
    if not observables:
        raise DataError(f"{path}: no observables found")
    return observables


def cmd_estimate(args) -> int:
    state = load_state(args.state_file)
    observables = _read_observables(args.observables)
    batch = collect_batch(state, args.ensemble, args.shots, args.seed)
    out, close = _open_out(args.out)
    try:
        out.write("observable,re,im,method,batches,shots,seed\n")
        for mu in observables:
            rep = estimate(batch, mu, method=args.method, batch_count=args.batches)
            name = " ".join(str(i) for i in mu)
            out.write(
                f"{name},{rep.estimate.real:.17g},{rep.estimate.imag:.17g},"
                f"{rep.method},{rep.batch_count},{args.shots},{args.seed}\n"
            )
    finally:
        if close:
            out.close()
    return EXIT_OK


def _verify_design3(args) -> dict:
    report = check_3design(args.n)
    report["tol"] = args.tol
    report["pass"] = bool(report["max_deviation"] < args.tol)
    return report


def _verify_gamma4(args) -> dict:
    gamma_uniform = gamma_4fold(uniform_angle_density())
    gamma_clifford = gamma_4fold(clifford_point_density())
    dev = max(abs(gamma_uniform - 1.5), abs(gamma_clifford - 1.0))
    return {
        "check": "gamma4",
        "n": 1,
        "gamma_uniform": gamma_uniform,
        "gamma_clifford_support": gamma_clifford,
        "max_deviation": dev,
        "tol": args.tol,
        "pass": bool(dev < args.tol),
    }


def _verify_lambda(args) -> dict:
    table = {}
    for k in range(args.n + 1):
        lam = lambda_eigenvalue(k, args.n)
        table[str(k)] = {
            "fraction": f"{lam.numerator}/{lam.denominator}",
            "value": float(lam),
        }
        direct = math.comb(args.n, k) / math.comb(2 * args.n, 2 * k)
        if abs(float(lam) - direct) > 1e-15:
            raise NumericError("lambda eigenvalue disagrees with direct evaluation")
    return {"check": "lambda", "n": args.n, "table": table, "max_deviation": 0.0, "pass": True}


def _verify_invariance(args, which: str) -> dict:
    from .exact import (
        check_matching_invariance,
        check_sign_invariance,
        enumerate_signed_permutation_group,
        matching_representative_ensemble,
        random_sub_ensemble,
    )
    from .statevec import random_state

    n = args.n
    if n > 3:
        raise ResourceError("invariance checks enumerate ensembles only up to n = 3")
    if n <= 2:
        perms, signs = enumerate_signed_permutation_group(n, determinant=1)
    else:
        # full group is 23040 elements; a random sub-ensemble plus the matching
        # representatives keeps 20-trial checks fast while remaining exact
        perms, signs = random_sub_ensemble(n, 512, derive_rng(args.seed, "sub-ensemble"))
        rp, rs = matching_representative_ensemble(n)
        perms = np.concatenate([perms, rp])
        signs = np.concatenate([signs, rs])
    state = random_state(n, derive_rng(args.seed, "state"))
    fn = check_sign_invariance if which == "sign-invariance" else check_matching_invariance
    rep = fn(perms, signs, state, trials=20, rng=derive_rng(args.seed, which), tol=args.tol)
    doc = {
        "check": rep.check,
        "n": rep.n_modes,
        "trials": rep.trials,
        "max_deviation": max(rep.max_moment_deviation, rep.max_channel_deviation),
        "max_moment_deviation": rep.max_moment_deviation,
        "max_channel_deviation": rep.max_channel_deviation,
        "tol": args.tol,
        "pass": bool(rep.passed),
    }
    if rep.negative_control_deviation is not None:
        doc["negative_control_deviation"] = rep.negative_control_deviation
    return doc


def cmd_verify(args) -> int:
    handlers = {
        "design3": _verify_design3,
        "gamma4": _verify_gamma4,
        "lambda": _verify_lambda,
        "sign-invariance": lambda a: _verify_invariance(a, "sign-invariance"),
        "matching-invariance": lambda a: _verify_invariance(a, "matching-invariance"),
    }
    report = handlers[args.check](args)
    text = json.dumps(report, indent=2)
    out, close = _open_out(args.out)
    try:
        out.write(text + "\n")
    finally:
        if close:
            out.close()
    if args.out not in (None, "-"):
        print(text)
    return EXIT_OK if report["pass"] else EXIT_VERIFY_FAIL


def cmd_bench(args) -> int:
    state = load_state(args.state_file)
    ensembles = tuple(e.strip() for e in args.ensembles.split(",") if e.strip())
    for e in ensembles:
        if e not in ENSEMBLES:
            raise DomainError(f"unknown ensemble {e!r}; expected one of {ENSEMBLES}")
    grid = tuple(int(float(x)) for x in args.grid.split(","))
    config = BenchConfig(
        state=state,
        ensembles=ensembles,
        shot_grid=grid,
        bootstrap_size=args.bootstrap,
        seed=args.seed,
    )
    rows = variance_experiment(config)
    csv_text = bench_rows_to_csv(rows)
    out, close = _open_out(args.out)
    try:
        out.write(csv_text)
    finally:
        if close:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matchgate-shadows",
        description="Matchgate classical shadows: samplers, estimators and exact verifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="emit random circuits as JSON lines")
    p.add_argument("--ensemble", required=True, choices=ENSEMBLES)
    p.add_argument("--n", type=int, required=True, help="number of fermionic modes / qubits")
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("estimate", help="collect shadows and estimate observables")
    p.add_argument("--state-file", required=True)
    p.add_argument("--ensemble", required=True, choices=ENSEMBLES)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--observables", required=True, help="file with one monomial per line")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--method", choices=("mean", "median_of_means"), default="mean")
    p.add_argument("--batches", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("verify", help="run an exact verification check")
    p.add_argument(
        "--check",
        required=True,
        choices=("design3", "gamma4", "sign-invariance", "matching-invariance", "lambda"),
    )
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("bench", help="error-versus-shots experiment (CSV)")
    p.add_argument("--state-file", required=True)
    p.add_argument("--ensembles", required=True, help="comma-separated ensemble names")
    p.add_argument("--grid", required=True, help="comma-separated shot counts")
    p.add_argument("--bootstrap", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MatchgateShadowsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
