"""Command line: classify, verify-kr and table.

Exit codes: 0 success, 1 verification mismatch, 2 usage error,
3 budget exhausted under --strict.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

from .density import alpha_poly, alpha_prime, alpha_value, kr_rhs
from .divisor import intersect_closed, intersect_tree
from .errors import BudgetExhausted, InvalidClass, SingularMatrix
from .herm import (
    AntiDiagonal, Diagonal, HermMatrix2, canonical_pair, classify, gram_pair,
    is_split_representable, randomize_pair,
)
from .oracle import DEFAULT_BUDGET, count_reps, lattice_L, normalizer
from .padic import PAdicElem, PrimeParam, _is_odd_prime

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    p: int = 3
    precision: int = 64
    alpha_max: int = 2
    beta_max: int = 3
    n_list: tuple = (-1, 1, 3, 5)
    q_list: tuple = (3,)
    oracle_level: int = 0
    budget: int = DEFAULT_BUDGET
    format: str = "csv"
    seed: int = 0
    strict: bool = False
    workers: int = 1

    def validate(self) -> None:
        if not _is_odd_prime(self.p):
            raise ValueError(f"--p must be an odd prime, got {self.p}")
        if self.precision < 4:
            raise ValueError("--precision must be at least 4")
        if self.alpha_max < 0 or self.beta_max < self.alpha_max:
            raise ValueError("need 0 <= alpha-max <= beta-max")
        if any(n % 2 == 0 for n in self.n_list):
            raise ValueError("--n-list entries must be odd")
        if any(q < 3 for q in self.q_list):
            raise ValueError("--q-list entries must be odd prime powers")
        if self.oracle_level < 0 or self.budget <= 0 or self.workers < 1:
            raise ValueError("oracle level, budget and workers must be positive")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["n_list"] = list(self.n_list)
        d["q_list"] = list(self.q_list)
        return d


# -- entry grammar --------------------------------------------------------

_TERM = re.compile(r"([+-]?)([^+-]+)")
_FACTOR = re.compile(r"^(?:(\d+)|pi(?:\^(-?\d+))?)(?:/(\d+))?$")


def parse_entry(text: str, field: PrimeParam) -> PAdicElem:
    """Parse sums of signed products such as `a`, `a/c`, `a+b*pi`, `-pi`, `3/4*pi`, `pi^-1`."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty entry")
    s = s.replace("^-", "^~")  # keep negative exponents out of the sign split
    total = field.zero
    pos = 0
    for m in _TERM.finditer(s):
        if m.start() != pos:
            raise ValueError(f"cannot parse {text!r}")
        pos = m.end()
        val = field.one if m.group(1) != "-" else -field.one
        for fac in m.group(2).replace("^~", "^-").split("*"):
            fm = _FACTOR.match(fac)
            if not fm:
                raise ValueError(f"cannot parse factor {fac!r} in {text!r}")
            num, exp, den = fm.groups()
            val = val * (int(num) if num is not None else field.pi_pow(int(exp or 1)))
            if den is not None:
                if int(den) == 0:
                    raise ValueError(f"zero denominator in {text!r}")
                val = val / int(den)
        total = total + val
    if pos != len(s):
        raise ValueError(f"cannot parse {text!r}")
    return total


def fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def emit(rows: list[dict], fmt_name: str, config: RunConfig | None, out) -> None:
    if fmt_name == "json":
        doc = {"config": config.as_dict() if config else None, "rows": rows}
        out.write(json.dumps(doc, indent=2) + "\n")
        return
    if not rows:
        return
    keys = list(rows[0])
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        out.write(buf.getvalue())
        return
    widths = {k: max(len(k), *(len(str(r[k])) for r in rows)) for k in keys}
    out.write("| " + " | ".join(k.ljust(widths[k]) for k in keys) + " |\n")
    out.write("|" + "|".join("-" * (widths[k] + 2) for k in keys) + "|\n")
    for r in rows:
        out.write("| " + " | ".join(str(r[k]).ljust(widths[k]) for k in keys) + " |\n")


# -- classify -------------------------------------------------------------

def cmd_classify(args, out) -> int:
    field = PrimeParam(args.p, args.precision)
    try:
        t11, t12, t21, t22 = (parse_entry(e, field) for e in args.entries)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if t21 != t12.conj() or not (t11.in_base() and t22.in_base()):
        print("error: matrix is not Hermitian", file=sys.stderr)
        return EXIT_USAGE
    try:
        c = classify(HermMatrix2(t11, t12, t22))
    except SingularMatrix as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    row = {
        "class": str(c),
        "integral": "yes" if c.integral else "no",
        "eps1": fmt(c.eps1) if isinstance(c, Diagonal) else "-",
        "split_representable": "yes" if is_split_representable(c) else "no",
    }
    if args.format == "text":
        for k, v in row.items():
            out.write(f"{k}: {v}\n")
    else:
        emit([row], args.format, None, out)
    return EXIT_OK


# -- verify-kr ------------------------------------------------------------

def _grid(cfg: RunConfig):
    classes = [Diagonal(a, b, 1) for a in range(cfg.alpha_max + 1)
               for b in range(a, cfg.beta_max + 1)]
    classes += [AntiDiagonal(n) for n in cfg.n_list]
    classes.append(Diagonal(-1, 0, 1))
    return classes


def _oracle_applies(c, level: int) -> bool:
    """Classes whose residue matrix is pinned down at this level."""
    if level <= 0:
        return False
    if isinstance(c, Diagonal):
        return 0 <= c.alpha and c.beta <= level - 1
    return -1 <= c.n <= 2 * level - 3


def _oracle_alpha(c, p: int, level: int, budget: int):
    field = PrimeParam(p)
    T = gram_pair(*canonical_pair(c, field))
    n = count_reps(lattice_L(p), T, level, budget)
    return n * normalizer(p, level, 2, 2)


def _kr_row(job):
    cfg, q, c, seed = job
    row = {"q": q, "class": str(c)}
    closed = intersect_closed(c, q, "split")
    rhs = kr_rhs(c, q)
    tree = None
    if _is_odd_prime(q):
        field = PrimeParam(q, cfg.precision)
        b1, b2 = randomize_pair(*canonical_pair(c, field), seed)
        tree = intersect_tree(b1, b2)
    oracle, skipped = None, None
    if q == cfg.p and _oracle_applies(c, cfg.oracle_level):
        try:
            oracle = _oracle_alpha(c, cfg.p, cfg.oracle_level, cfg.budget)
        except BudgetExhausted as exc:
            skipped = str(exc)
    ok = rhs == closed and (tree is None or tree == closed)
    if oracle is not None:
        ok = ok and oracle == alpha_value("L", c, q, 1, -1)
    row.update({
        "int_closed": fmt(closed),
        "int_tree": fmt(tree),
        "kr_rhs": fmt(rhs),
        "oracle_alpha": fmt(oracle) if skipped is None else f"SKIPPED({skipped})",
        "status": "OK" if ok else "MISMATCH",
    })
    if ok and skipped is not None:
        row["status"] = "SKIPPED"
    return row


def cmd_verify_kr(cfg: RunConfig, out) -> int:
    jobs = []
    for q in cfg.q_list:
        for c in _grid(cfg):
            jobs.append((cfg, q, c, cfg.seed + len(jobs)))
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            rows = list(ex.map(_kr_row, jobs))
    else:
        rows = [_kr_row(j) for j in jobs]
    emit(rows, cfg.format, cfg, out)
    if any(r["status"] == "MISMATCH" for r in rows):
        return EXIT_MISMATCH
    if cfg.strict and any(r["status"] == "SKIPPED" for r in rows):
        return EXIT_BUDGET
    return EXIT_OK


# -- table ----------------------------------------------------------------

def _intersection_table(cfg: RunConfig):
    rows = []
    for q in cfg.q_list:
        for space in ("split", "nonsplit"):
            eps = 1 if space == "split" else -1
            for a in range(cfg.alpha_max + 1):
                for b in range(a, cfg.beta_max + 1):
                    c = Diagonal(a, b, eps)
                    rows.append({"space": space, "q": q, "class": str(c),
                                 "int": fmt(intersect_closed(c, q, space))})
        for n in cfg.n_list:
            c = AntiDiagonal(n)
            rows.append({"space": "split", "q": q, "class": str(c),
                         "int": fmt(intersect_closed(c, q, "split"))})
    return rows


def _density_table(cfg: RunConfig):
    rows = []
    for q in cfg.q_list:
        classes = [Diagonal(a, b, e) for a in range(cfg.alpha_max + 1)
                   for b in range(a, cfg.beta_max + 1) for e in (1, -1)]
        classes += [AntiDiagonal(n) for n in cfg.n_list]
        for base in ("L", "H"):
            for c in classes:
                for e2 in ((-1, 1) if base == "L" else (-1,)):
                    poly = alpha_poly(base, c, e2)
                    rows.append({
                        "q": q, "base": base, "class": str(c),
                        "eps2": fmt(e2) if base == "L" else "-",
                        "alpha_at_1": fmt(poly(q, 1)),
                        "alpha_prime": fmt(alpha_prime(base, c, e2, q)),
                        "alpha_at_q-2": fmt(poly(q, Fraction(1, q * q))),
                        "poly": str(poly),
                    })
    return rows


def cmd_table(which: str, cfg: RunConfig, out) -> int:
    rows = _intersection_table(cfg) if which == "intersection" else _density_table(cfg)
    emit(rows, cfg.format, cfg, out)
    return EXIT_OK


# -- argument handling ----------------------------------------------------

def _int_list(s: str) -> tuple:
    try:
        return tuple(int(x) for x in s.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ramkr", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--p", type=int, default=3)
        p.add_argument("--precision", type=int, default=64)

    def grid(p):
        p.add_argument("--alpha-max", type=int, default=2)
        p.add_argument("--beta-max", type=int, default=3)
        p.add_argument("--n-list", type=_int_list, default=(-1, 1, 3, 5))
        p.add_argument("--q-list", type=_int_list, default=None)
        p.add_argument("--oracle-level", type=int, default=0)
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        p.add_argument("--format", choices=("csv", "json", "markdown"), default="csv")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--strict", action="store_true")
        p.add_argument("--workers", type=int, default=1)

    c = sub.add_parser("classify", help="classify a Hermitian 2x2 matrix")
    common(c)
    c.add_argument("--format", choices=("text", "csv", "json", "markdown"), default="text")
    c.add_argument("entries", nargs=4, metavar="ENTRY", help="t11 t12 t21 t22")

    v = sub.add_parser("verify-kr", help="check Int = KR right-hand side over a grid")
    common(v)
    grid(v)

    t = sub.add_parser("table", help="closed-formula tables")
    t.add_argument("which", choices=("intersection", "density"))
    common(t)
    grid(t)
    return ap


_VALUE_FLAGS = {"--p", "--precision", "--format"}


def _protect_entries(argv: list[str]) -> list[str]:
    """Let classify entries such as -pi through argparse's option detection."""
    if not argv or argv[0] != "classify" or "--" in argv:
        return argv
    opts, entries = [], []
    it = iter(argv[1:])
    for tok in it:
        name = tok.split("=", 1)[0]
        if name in _VALUE_FLAGS or name in ("-h", "--help"):
            opts.append(tok)
            if "=" not in tok and name in _VALUE_FLAGS:
                opts.append(next(it, ""))
        else:
            entries.append(tok)
    return ["classify", *opts, "--", *entries]


_LIST_FLAGS = {"--n-list", "--q-list"}


def _join_list_values(argv: list[str]) -> list[str]:
    """Rewrite `--n-list -1,1` as `--n-list=-1,1` so negatives are not read as flags."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _LIST_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def config_from_args(args) -> RunConfig:
    return RunConfig(
        p=args.p, precision=args.precision, alpha_max=args.alpha_max,
        beta_max=args.beta_max, n_list=tuple(args.n_list),
        q_list=tuple(args.q_list) if args.q_list else (args.p,),
        oracle_level=args.oracle_level, budget=args.budget, format=args.format,
        seed=args.seed, strict=args.strict, workers=args.workers,
    )


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(_protect_entries(_join_list_values(argv)))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "classify":
            return cmd_classify(args, out)
        cfg = config_from_args(args)
        cfg.validate()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "verify-kr":
            return cmd_verify_kr(cfg, out)
        return cmd_table(args.which, cfg, out)
    except InvalidClass as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
