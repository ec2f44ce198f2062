"""``permlab`` command line: perm, estimate, verify, tables.

Exit status is 0 on success, 1 when a verification check fails and 2 for
usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import estimators, moments, verify
from .errors import InvalidInputError, ResourceLimitError
from .estimators import EstimatorSpec, InstanceMatrix
from .linalg import MEASURES

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ESTIMATE_FIELDS = ("estimator", "measure", "d", "n", "trials", "mean", "variance", "critical_ratio", "stderr_mean", "seed")


class MatrixFileError(InvalidInputError):
    pass


def parse_matrix(text: str, source: str = "<matrix>") -> InstanceMatrix:
    """Line 1 holds ``n``; the next ``n`` lines hold ``n`` entries each. ``#`` starts a comment line."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFileError(f"{source}: empty matrix file")
    try:
        n = int(lines[0])
    except ValueError:
        raise MatrixFileError(f"{source}: first line must be the size n, got {lines[0]!r}") from None
    if n < 1:
        raise MatrixFileError(f"{source}: size must be positive")
    if len(lines) - 1 != n:
        raise MatrixFileError(f"{source}: expected {n} rows, found {len(lines) - 1}")
    rows = []
    for k, ln in enumerate(lines[1:], start=1):
        parts = ln.split()
        if len(parts) != n:
            raise MatrixFileError(f"{source}: row {k} has {len(parts)} entries, expected {n}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise MatrixFileError(f"{source}: row {k} has a non-numeric entry") from None
    try:
        return InstanceMatrix(np.array(rows))
    except InvalidInputError as exc:
        raise MatrixFileError(f"{source}: {exc}") from None


def format_matrix(A: InstanceMatrix) -> str:
    def fmt(v: float) -> str:
        return str(int(v)) if float(v).is_integer() else repr(float(v))

    rows = [" ".join(fmt(v) for v in row) for row in A.entries]
    return "\n".join([str(A.n)] + rows) + "\n"


def read_matrix(path: str | Path) -> InstanceMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_matrix(text, str(path))


def write_matrix(path: str | Path, A: InstanceMatrix) -> None:
    Path(path).write_text(format_matrix(A))


def _integral(A: InstanceMatrix) -> np.ndarray | None:
    e = A.entries
    return e.astype(np.int64) if np.all(e == np.round(e)) else None


def cmd_perm(args) -> int:
    A = read_matrix(args.matrix)
    ints = _integral(A)
    value = estimators.ryser_permanent(ints if ints is not None else A.entries)
    print(value if isinstance(value, int) else repr(float(value)))
    return EXIT_OK


def _emit(records: list[dict], fmt: str, fields: Sequence[str]) -> None:
    if fmt == "json":
        out = records[0] if len(records) == 1 else records
        print(json.dumps(out, indent=2))
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
        sys.stdout.write(buf.getvalue())


def cmd_estimate(args) -> int:
    A = read_matrix(args.matrix)
    if args.estimator in estimators.MATRIX_KINDS:
        spec = EstimatorSpec(args.estimator, args.measure, args.d)
    else:
        if args.measure is not None or args.d is not None:
            raise InvalidInputError(f"{args.estimator} is a scalar estimator; drop --measure and --d")
        spec = EstimatorSpec(args.estimator)
    if spec.is_matrix_kind and A.n > args.cap_n:
        raise ResourceLimitError(f"n={A.n} exceeds --cap-n {args.cap_n}")
    stats = estimators.run_campaign(A, spec, args.trials, args.seed)
    record = {
        "estimator": spec.kind,
        "measure": spec.measure,
        "d": spec.d,
        "n": A.n,
        "trials": stats.trials,
        "mean": stats.mean,
        "variance": stats.variance,
        "critical_ratio": stats.critical_ratio_estimate,
        "stderr_mean": stats.stderr_mean,
        "seed": stats.master_seed,
    }
    _emit([record], args.format, ESTIMATE_FIELDS)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = verify.run_suite(args.suite, cap_n=args.cap_n, trials=args.trials, seed=args.seed)
    for c in checks:
        print(c.line())
    failed = sum(c.status == verify.FAIL for c in checks)
    skipped = sum(c.status == verify.SKIP for c in checks)
    print(f"{len(checks) - failed - skipped} passed, {failed} failed, {skipped} skipped")
    return EXIT_FAIL if failed else EXIT_OK


TABLE_FIELDS = (
    "n", "d",
    "a_d", "a_d_decimal",
    "a2", "a2_decimal",
    "a2_tilde", "a2_tilde_decimal",
    "sym_ratio", "sym_ratio_decimal",
    "exp_envelope", "character_envelope", "character_envelope_decimal", "floor", "floor_decimal",
)


def _frac(x: Fraction | None) -> tuple[str, str]:
    if x is None:
        return "", ""
    return str(x), f"{float(x):.12g}"


def table_rows(n_max: int, d_max: int, cap_n: int) -> list[dict]:
    rows = []
    for n in range(1, n_max + 1):
        for d in range(1, d_max + 1):
            ad = moments.a_d_closed(n, d)
            small = n <= min(4, cap_n)
            a2 = moments.a2_bruteforce(n, d) if small else None
            at = moments.a2_tilde_bruteforce(n, d) if small else None
            prof = moments.bound_profiles(n, d)
            row = {"n": n, "d": d, "exp_envelope": f"{prof.exp_envelope:.12g}"}
            row["a_d"], row["a_d_decimal"] = _frac(ad)
            row["a2"], row["a2_decimal"] = _frac(a2)
            row["a2_tilde"], row["a2_tilde_decimal"] = _frac(at)
            row["sym_ratio"], row["sym_ratio_decimal"] = _frac(a2 / ad**2 if a2 is not None else None)
            row["character_envelope"], row["character_envelope_decimal"] = _frac(prof.character_envelope)
            row["floor"], row["floor_decimal"] = _frac(prof.floor)
            rows.append(row)
    return rows


def cmd_tables(args) -> int:
    _emit(table_rows(args.n_max, args.d_max, args.cap_n), args.format, TABLE_FIELDS)
    return EXIT_OK


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permlab", description="Monte Carlo permanent estimators and their exact moments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("perm", help="exact permanent of a matrix file (Ryser)")
    p.add_argument("--matrix", required=True, help="matrix file")
    p.set_defaults(func=cmd_perm)

    p = sub.add_parser("estimate", help="run a seeded Monte Carlo campaign")
    p.add_argument("--matrix", required=True)
    p.add_argument("--estimator", required=True, choices=estimators.KINDS)
    p.add_argument("--measure", choices=MEASURES)
    p.add_argument("--d", type=_positive)
    p.add_argument("--trials", type=_positive, default=verify.DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--cap-n", type=_positive, default=verify.DEFAULT_CAP_N)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=verify.SUITES, default="all")
    p.add_argument("--cap-n", type=_positive, default=verify.DEFAULT_CAP_N)
    p.add_argument("--trials", type=_positive, default=verify.DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tables", help="exact moment tables and bound envelopes")
    p.add_argument("--n-max", type=_positive, default=6)
    p.add_argument("--d-max", type=_positive, default=6)
    p.add_argument("--cap-n", type=_positive, default=4)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, ResourceLimitError) as exc:
        print(f"permlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
