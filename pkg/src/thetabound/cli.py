"""Command-line front end.

Exit codes: 0 everything checked Holds, 1 some claim Fails, 2 Unknowns remain
after retry, 3 usage or range error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, bounds, rigor
from .chebyshev import theta_exact
from .claims import Context, find_crossover, run_suite
from .claims.engine import INTERPRETATION, CrossoverResult
from .claims.quantities import LAMBDA_MIN_INDEX, lambda_effective, relative_error
from .claims.registry import DEFAULT_EPSILON, REGISTRY, Registry
from .errors import DomainError, PrecisionError, RegistryError, ResourceError
from .primes import SieveConfig, load_or_build
from .rigor import NATIVE, Verdict

EXIT_OK, EXIT_FAILS, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3
CACHE_ENV = "THBD_CACHE"
DEFAULT_MAX_N = 100_000

ENCLOSURE_COLUMNS = ("theta", "ratio", "F025", "F1", "G_lower", "G_upper", "U", "V", "rel_err", "lambda_eff")
TABLE_COLUMNS = ("n", "p_n") + ENCLOSURE_COLUMNS

VERIFY_CSV_HEADER = (
    "claim_id",
    "kind",
    "verdict",
    "range_lo",
    "range_hi",
    "holds",
    "fail_count",
    "unknown_count",
    "first_violation",
    "precision_used",
    "retried",
    "epsilon",
    "n0",
    "exhaustive",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    max_n: int = DEFAULT_MAX_N
    precision: int = NATIVE
    claims: list = field(default_factory=lambda: ["all"])
    format: str = "json"
    output_path: str | None = None
    extended: bool = False
    jobs: int = 1
    epsilon: float = DEFAULT_EPSILON
    timing: bool = False

    def __post_init__(self):
        if self.max_n < 2:
            raise UsageError("--max-n must be >= 2")
        if not self.claims:
            raise UsageError("--claims must name at least one claim")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        if not 0 < self.epsilon < 1:
            raise UsageError("--epsilon must lie strictly between 0 and 1")
        try:
            self.precision = rigor.resolve_precision(self.precision)
        except PrecisionError as exc:
            raise UsageError(str(exc)) from None


# -- formatting ---------------------------------------------------------------


def fmt(value) -> str:
    """Fixed text for one numeric cell: integers as-is, floats to 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _json_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, (float, np.floating)):
        return fmt(value)
    return json.dumps(value)


def write_csv(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(row.get(k)) if not isinstance(row.get(k), str) else row[k] for k in header) + "\n")
    return out.getvalue()


def write_json_rows(header, rows) -> str:
    lines = []
    for row in rows:
        body = ", ".join(f"{json.dumps(k)}: {_json_value(row.get(k))}" for k in header)
        lines.append("  {" + body + "}")
    return "[\n" + ",\n".join(lines) + "\n]\n" if lines else "[]\n"


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- context --------------------------------------------------------------------


def _context(max_n: int, jobs: int = 1) -> Context:
    return Context.build(max_n, cache_path=os.environ.get(CACHE_ENV) or None, jobs=jobs)


def _select(names, registry: Registry):
    if names == ["all"]:
        return "all"
    ids = []
    for chunk in names:
        ids.extend(part.strip() for part in chunk.split(",") if part.strip())
    for cid in ids:
        if cid not in registry:
            raise UsageError(f"unknown claim id {cid!r}; see 'registry'")
    if not ids:
        raise UsageError("--claims must name at least one claim")
    return ids


# -- commands -------------------------------------------------------------------


def _verify_rows(results, registry: Registry) -> list[dict]:
    rows = []
    for r in results:
        if isinstance(r, CrossoverResult):
            rows.append(
                {
                    "claim_id": r.claim_id,
                    "kind": "crossover-family",
                    "verdict": "REPORTED",
                    "range_lo": registry.get(r.claim_id).domain_min,
                    "range_hi": r.horizon,
                    "epsilon": r.epsilon,
                    "n0": r.n0,
                    "exhaustive": r.exhaustive,
                }
            )
            continue
        d = r.to_dict()
        rng = d["range_checked"] or [None, None]
        rows.append(
            {
                "claim_id": d["claim_id"],
                "kind": d["kind"],
                "verdict": d["verdict"],
                "range_lo": rng[0],
                "range_hi": rng[1],
                "holds": d["holds"],
                "fail_count": d["fail_count"],
                "unknown_count": d["unknown_count"],
                "first_violation": d["first_violation"],
                "precision_used": d["precision_used"],
                "retried": d["retried"],
                "epsilon": d["epsilon"],
            }
        )
    return rows


def exit_code(results) -> int:
    verdicts = [r.verdict for r in results if not isinstance(r, CrossoverResult) and not r.skipped]
    if Verdict.FAILS in verdicts:
        return EXIT_FAILS
    if Verdict.UNKNOWN in verdicts:
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_verify(config: RunConfig, registry: Registry | None = None, ctx: Context | None = None) -> tuple[int, str]:
    registry = registry or REGISTRY
    selection = _select(config.claims, registry)
    if ctx is None:
        ctx = _context(config.max_n, config.jobs)
    results = run_suite(
        selection,
        config.max_n,
        ctx,
        prec=config.precision,
        jobs=config.jobs,
        epsilon=config.epsilon,
        registry=registry,
        extended=config.extended,
    )
    if config.format == "csv":
        text = write_csv(VERIFY_CSV_HEADER, _verify_rows(results, registry))
    else:
        doc = {
            "version": __version__,
            "max_n": config.max_n,
            "precision": config.precision,
            "epsilon": config.epsilon,
            "extended": config.extended,
            "relative_error": INTERPRETATION,
            "continuous_windows": "continuous claims are certified on the finite x-window in range_checked",
            "reports": [
                r.to_dict() if isinstance(r, CrossoverResult) else r.to_dict(include_time=config.timing)
                for r in results
            ],
        }
        text = json.dumps(doc, indent=2) + "\n"
    return exit_code(results), text


def _expand(columns) -> list[str]:
    header = []
    for col in columns:
        if col in ENCLOSURE_COLUMNS:
            header += [f"{col}_lo", f"{col}_hi"]
        elif col in ("n", "p_n"):
            header.append(col)
        else:
            # Accept an already-expanded name such as theta_lo.
            base, _, side = col.rpartition("_")
            if base in ENCLOSURE_COLUMNS and side in ("lo", "hi"):
                header.append(col)
            else:
                raise UsageError(f"unknown column {col!r}")
    return header


def table_rows(ctx: Context, first: int, last: int, step: int, prec: int = NATIVE) -> list[dict]:
    """Every table column for ``n = first, first + step, ..., <= last``."""
    if first < 2 or last < first or step < 1:
        raise UsageError("table needs 2 <= from <= to and step >= 1")
    ctx.require(last)
    n = np.arange(first, last + 1, step, dtype=np.int64)
    cols = {
        "theta": ctx.theta(n, prec),
        "ratio": ctx.ratio(n, prec),
        "F025": bounds.F(n, "0.25", prec),
        "F1": bounds.F(n, 1, prec),
        "G_lower": bounds.G(n, bounds.CONSTANTS.a_robin, prec),
        "G_upper": bounds.G(n, bounds.CONSTANTS.a_mr, prec),
        "U": bounds.U(n, prec),
        "V": bounds.V(n, prec),
        "rel_err": relative_error(n, ctx, prec),
    }
    big = n >= LAMBDA_MIN_INDEX
    lam = lambda_effective(n[big], ctx, prec) if big.any() else None
    floats = {k: v.to_floats() for k, v in cols.items()}
    lam_f = lam.to_floats() if lam is not None else None
    primes = ctx.prime(n)
    rows = []
    j = 0
    for i, k in enumerate(n.tolist()):
        row = {"n": k, "p_n": int(primes[i])}
        for name, (lo, hi) in floats.items():
            row[f"{name}_lo"] = float(lo[i])
            row[f"{name}_hi"] = float(hi[i])
        if k >= LAMBDA_MIN_INDEX:
            row["lambda_eff_lo"] = float(lam_f[0][j])
            row["lambda_eff_hi"] = float(lam_f[1][j])
            j += 1
        else:
            row["lambda_eff_lo"] = row["lambda_eff_hi"] = None
        rows.append(row)
    return rows


def cmd_table(first: int, last: int, step: int, columns, fmt_name: str, ctx: Context | None = None,
              prec: int = NATIVE) -> str:
    header = _expand(columns or TABLE_COLUMNS)
    if ctx is None:
        if first < 2 or last < first or step < 1:
            raise UsageError("table needs 2 <= from <= to and step >= 1")
        ctx = _context(last)
    rows = table_rows(ctx, first, last, step, prec)
    if fmt_name == "csv":
        return write_csv(header, rows)
    return write_json_rows(header, rows)


def cmd_crossover(claim_id: str, horizon: int, epsilon=None, fmt_name: str = "json",
                  registry: Registry | None = None, ctx: Context | None = None, prec: int = NATIVE) -> str:
    registry = registry or REGISTRY
    if claim_id not in registry:
        raise UsageError(f"unknown claim id {claim_id!r}")
    claim = registry.get(claim_id)
    if claim.kind == "continuous-sign":
        raise UsageError(f"{claim_id} is a continuous claim; crossovers need an indexed claim")
    if horizon < claim.domain_min:
        raise UsageError(f"--horizon must be >= {claim.domain_min}")
    if claim.kind != "crossover-family" and epsilon is not None:
        raise UsageError(f"{claim_id} takes no --epsilon")
    if ctx is None and claim.needs_context:
        ctx = _context(horizon)
    result = find_crossover(claim, horizon, ctx, epsilon, prec=prec, registry=registry)
    d = result.to_dict()
    if claim.kind == "crossover-family" or claim_id.startswith("RELERR"):
        d["relative_error"] = INTERPRETATION if claim_id.startswith("RELERR") else None
    if fmt_name == "csv":
        header = ("claim_id", "horizon", "n0", "exhaustive", "epsilon", "n_epsilon", "unknowns_below")
        return write_csv(header, [d])
    return json.dumps(d, indent=2) + "\n"


def _primes_for(value: int):
    return load_or_build(SieveConfig(target_value=value), os.environ.get(CACHE_ENV) or None)


def cmd_nth_prime(n: int) -> str:
    if n < 1:
        raise UsageError("n must be >= 1")
    table = load_or_build(SieveConfig(target_index=n), os.environ.get(CACHE_ENV) or None)
    return f"{table.nth_prime(n)}\n"


def cmd_pi(x: int) -> str:
    if x < 0:
        raise UsageError("x must be >= 0")
    return f"{_primes_for(max(x, 2)).prime_count(x)}\n"


def cmd_theta(n: int, prec: int = NATIVE, fmt_name: str = "text") -> str:
    if n < 1:
        raise UsageError("n must be >= 1")
    if rigor._is_mp(prec):
        table = load_or_build(SieveConfig(target_index=n), os.environ.get(CACHE_ENV) or None)
        enc = theta_exact(table, n, prec)
    else:
        enc = _context(max(n, 2)).theta(n, prec)
    lo, hi = enc.to_floats()
    if fmt_name == "json":
        return write_json_rows(("n", "theta_lo", "theta_hi"), [{"n": n, "theta_lo": float(lo), "theta_hi": float(hi)}])
    if fmt_name == "csv":
        return write_csv(("n", "theta_lo", "theta_hi"), [{"n": n, "theta_lo": float(lo), "theta_hi": float(hi)}])
    return f"{fmt(lo)} {fmt(hi)}\n"


def cmd_registry(registry: Registry | None = None) -> str:
    return json.dumps((registry or REGISTRY).export(), indent=2) + "\n"


# -- argument parsing -------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        value = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if "e" in text.lower() and float(text) != value:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thetabound", description="Certified checks of bounds for theta(p_n).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt_default="json", fmts=("csv", "json")):
        p.add_argument("--format", choices=fmts, default=fmt_default)
        p.add_argument("--out", default=None, help="write to this path instead of stdout")
        p.add_argument("--precision", type=int, default=NATIVE, help="working precision in bits")

    v = sub.add_parser("verify", help="check claims over their claimed ranges")
    v.add_argument("--claims", nargs="+", default=["all"], help="claim ids (comma or space separated) or 'all'")
    v.add_argument("--max-n", type=_positive_int, default=DEFAULT_MAX_N)
    v.add_argument("--extended", action="store_true", help="include the large-index streamed check")
    v.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    v.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    v.add_argument("--timing", action="store_true", help="include wall times (output is then not byte-stable)")
    common(v)

    t = sub.add_parser("table", help="per-index enclosures as CSV or JSON")
    t.add_argument("--from", dest="first", type=_positive_int, required=True)
    t.add_argument("--to", dest="last", type=_positive_int, required=True)
    t.add_argument("--step", type=_positive_int, default=1)
    t.add_argument("--columns", nargs="+", default=None, help=f"any of: {' '.join(TABLE_COLUMNS)}")
    common(t, "csv")

    c = sub.add_parser("crossover", help="smallest n0 from which a claim holds up to the horizon")
    c.add_argument("claim")
    c.add_argument("--horizon", type=_positive_int, default=10_000)
    c.add_argument("--epsilon", type=float, default=None)
    common(c)

    p = sub.add_parser("nth-prime", help="the n-th prime")
    p.add_argument("n", type=_positive_int)
    q = sub.add_parser("pi", help="number of primes <= x")
    q.add_argument("x", type=_positive_int)
    th = sub.add_parser("theta", help="enclosure of theta(p_n)")
    th.add_argument("n", type=_positive_int)
    common(th, "text", ("text", "csv", "json"))

    r = sub.add_parser("registry", help="the claim registry as JSON")
    r.add_argument("--out", default=None)
    return parser


def main(argv=None, registry: Registry | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            config = RunConfig(
                max_n=args.max_n,
                precision=args.precision,
                claims=args.claims,
                format=args.format,
                output_path=args.out,
                extended=args.extended,
                jobs=args.jobs,
                epsilon=args.epsilon,
                timing=args.timing,
            )
            code, text = cmd_verify(config, registry)
            _emit(text, config.output_path)
            return code
        if args.command in ("table", "crossover", "theta"):
            try:
                prec = rigor.resolve_precision(args.precision)
            except PrecisionError as exc:
                raise UsageError(str(exc)) from None
        if args.command == "table":
            text = cmd_table(args.first, args.last, args.step, args.columns, args.format, prec=prec)
        elif args.command == "crossover":
            text = cmd_crossover(args.claim, args.horizon, args.epsilon, args.format, registry, prec=prec)
        elif args.command == "nth-prime":
            text = cmd_nth_prime(args.n)
        elif args.command == "pi":
            text = cmd_pi(args.x)
        elif args.command == "theta":
            text = cmd_theta(args.n, prec, args.format)
        else:
            text = cmd_registry(registry)
        _emit(text, getattr(args, "out", None))
        return EXIT_OK
    except (UsageError, RegistryError, DomainError, PrecisionError, ResourceError, ValueError, IndexError) as exc:
        print(f"thetabound: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
