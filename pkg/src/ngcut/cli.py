"""Command-line entry point: ``ngcut {solve,exact,bench,render,convert}``.

Exit codes: 0 success, 1 I/O or parse error, 2 usage error or a DCA run
whose final iterate does not round to a feasible pattern.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import os
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import io as ngio
from .dca import DcaConfig, LpFailure, run_dca
from .exact import solve_exact_bb
from .formulation import Formulation, model_stats
from .lp import BACKENDS

DATA_ENV = "NGCUT_DATA_DIR"

# tuned penalty parameters (t, u) for the twelve OR-Library ngcut problems
REFERENCE_TU = {
    1: (30.0, 10.0), 2: (30.0, 30.0), 3: (20.0, 5.0), 4: (25.0, 25.0),
    5: (20.0, 80.0), 6: (25.0, 200.0), 7: (50.0, 100.0), 8: (50.0, 100.0),
    9: (5.0, 5.0), 10: (100.0, 100.0), 11: (100.0, 100.0), 12: (180.0, 10.0),
}

_INIT = {"initial-dca": "initial_dca", "zeros": "zeros", "ones": "ones", "lp": "lp_relaxation"}


class CliError(Exception):
    """Reported on stderr with exit code 1."""


@dataclass
class BenchRow:
    instance: str
    L: int
    W: int
    m: int
    n_P: int
    n_Q: int
    n_vars: int
    n_cons: int
    algorithm: str
    objective: str
    iterations: int
    wall_time: float
    t: float | None
    u: float | None
    status: str


BENCH_COLUMNS = [f.name for f in fields(BenchRow)]


# ------------------------------------------------------------------ helpers

def resolve_path(path: str) -> Path:
    """Use ``path`` as given, else look it up under ``$NGCUT_DATA_DIR``."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = os.environ.get(DATA_ENV)
    if base and (Path(base) / p).exists():
        return Path(base) / p
    return p


def _read_text(path: str) -> str:
    p = resolve_path(path)
    try:
        return p.read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"{p}: cannot read: {exc}") from None


def _columns(text: str) -> tuple:
    return tuple(c.strip() for c in text.split(","))


def load_ngcut(path: str, columns: str) -> list:
    text = _read_text(path)
    try:
        return ngio.parse_ngcut(text, _columns(columns))
    except ValueError as exc:
        raise CliError(f"{resolve_path(path)}: {exc}") from None


def load_instance(args):
    """Returns ``(instance, ngcut index or None)``."""
    if args.instance:
        text = _read_text(args.instance)
        try:
            return ngio.parse_canonical(text), None
        except ngio.ParseError as exc:
            raise CliError(f"{resolve_path(args.instance)}: {exc}") from None
    if args.ngcut:
        problems = load_ngcut(args.ngcut, args.columns)
        k = args.index
        if not 1 <= k <= len(problems):
            raise CliError(f"{resolve_path(args.ngcut)}: index {k} out of range 1..{len(problems)}")
        return problems[k - 1], k
    raise CliError("give --instance or --ngcut")


def _write(path: str, text: str):
    try:
        Path(path).write_text(text, encoding="ascii", newline="\n")
    except OSError as exc:
        raise CliError(f"{path}: cannot write: {exc}") from None


def _positive(kind):
    def conv(s):
        v = kind(s)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be > 0, got {s}")
        return v
    return conv


def _add_source(sp, required: bool = True):
    g = sp.add_mutually_exclusive_group(required=required)
    g.add_argument("--instance", help="canonical instance file")
    g.add_argument("--ngcut", help="OR-Library ngcut file")
    sp.add_argument("--index", type=int, default=1, help="problem number in the ngcut file (1-based)")
    sp.add_argument("--columns", default=",".join(ngio.NGCUT_DEFAULT_ORDER),
                    help="per-piece column order of the ngcut file; '-' skips a column")


def _penalties(args, index):
    t_def, u_def = REFERENCE_TU.get(index, (DcaConfig.t, DcaConfig.u)) if index else (DcaConfig.t, DcaConfig.u)
    return (args.t if args.t is not None else t_def), (args.u if args.u is not None else u_def)


# ------------------------------------------------------------------ commands

def cmd_solve(args) -> int:
    inst, index = load_instance(args)
    t, u = _penalties(args, index)
    cfg = DcaConfig(t=t, u=u, epsilon=args.eps, max_iter=args.max_iter,
                    init_strategy=_INIT[args.init], backend=args.backend)
    res = run_dca(inst, cfg)
    tr = res.trace
    if args.trace:
        for k, (F, disp) in enumerate(zip(tr.F_values[1:], tr.displacements), 1):
            print(f"iter {k:4d}  F {F:.10g}  displacement {disp:.3e}")
    print(f"instance    {inst.name}")
    print(f"t, u        {t:g}, {u:g}")
    if res.feasible:
        print(f"value       {res.total_value}")
    else:
        what = f"{len(res.fractional)} fractional components" if res.fractional else "infeasible pattern"
        print(f"value       none ({what})")
    print(f"iterations  {tr.iterations} ({tr.termination})")
    print(f"time        {res.wall_time:.3f} s")
    if res.feasible:
        rec = ngio.SolutionRecord(inst.name, res.placements, res.total_value, "dca",
                                  t=t, u=u, epsilon=args.eps, init=args.init,
                                  iterations=tr.iterations, wall_time=res.wall_time)
        if args.out:
            _write(args.out, ngio.write_solution(rec))
        if args.svg:
            _write(args.svg, ngio.render_svg(inst, res.placements))
    return 0 if res.feasible else 2


def cmd_exact(args) -> int:
    inst, _ = load_instance(args)
    res = solve_exact_bb(inst, time_limit=args.time_limit, backend=args.backend)
    print(f"instance    {inst.name}")
    print(f"value       {res.optimal_value}")
    print(f"status      {res.status}")
    print(f"nodes       {res.nodes_explored}")
    print(f"time        {res.wall_time:.3f} s")
    for i, p, q in res.placements:
        print(f"  piece {i} ({ngio.piece_letter(i)}) at ({p}, {q})")
    if args.out:
        rec = ngio.SolutionRecord(inst.name, res.placements, res.optimal_value, "exact",
                                  status=res.status, wall_time=res.wall_time)
        _write(args.out, ngio.write_solution(rec))
    return 0


def read_params(path: str) -> dict:
    """Lines ``<index> <t> <u>``; '#' starts a comment."""
    out = {}
    for k, line in enumerate(_read_text(path).splitlines(), 1):
        body = line.split("#", 1)[0].split()
        if not body:
            continue
        try:
            idx, t, u = int(body[0]), float(body[1]), float(body[2])
            if len(body) != 3 or not (t > 0 and u > 0):
                raise ValueError
        except (ValueError, IndexError):
            raise CliError(f"{path}:{k}: expected '<index> <t> <u>' with t, u > 0") from None
        out[idx] = (t, u)
    return out


def _bench_one(index: int, inst, tu: dict, args) -> list:
    t, u = tu.get(index, (DcaConfig.t, DcaConfig.u))
    form = Formulation(inst)
    st = model_stats(form)
    base = dict(instance=inst.name, L=inst.stock_length, W=inst.stock_width, m=st["m"],
                n_P=st["n_P"], n_Q=st["n_Q"], n_vars=st["n_vars"], n_cons=st["n_rows_raw"])
    rows = []
    t0 = time.perf_counter()
    try:
        res = run_dca(form, DcaConfig(t=t, u=u, backend=args.backend))
        obj = str(res.total_value) if res.feasible else "-"
        status = "feasible" if res.feasible else ("fractional" if res.fractional else "infeasible")
        rows.append(BenchRow(**base, algorithm="dca", objective=obj, iterations=res.trace.iterations,
                             wall_time=res.wall_time, t=t, u=u, status=status))
    except (LpFailure, ValueError) as exc:
        rows.append(BenchRow(**base, algorithm="dca", objective="-", iterations=0,
                             wall_time=time.perf_counter() - t0, t=t, u=u, status=f"error: {exc}"))
    if args.with_exact:
        t0 = time.perf_counter()
        try:
            ex = solve_exact_bb(form, time_limit=args.time_limit, backend=args.backend)
            rows.append(BenchRow(**base, algorithm="exact", objective=str(ex.optimal_value),
                                 iterations=ex.nodes_explored, wall_time=ex.wall_time,
                                 t=None, u=None, status=ex.status))
        except (LpFailure, ValueError) as exc:
            rows.append(BenchRow(**base, algorithm="exact", objective="-", iterations=0,
                                 wall_time=time.perf_counter() - t0, t=None, u=None,
                                 status=f"error: {exc}"))
    return rows


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.3f}" if v != int(v) or v > 1e6 else f"{v:g}"
    return str(v)


def format_table(rows) -> str:
    body = [[_cell(getattr(r, c)) for c in BENCH_COLUMNS] for r in rows]
    widths = [max(len(c), *(len(b[k]) for b in body)) if body else len(c)
              for k, c in enumerate(BENCH_COLUMNS)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(BENCH_COLUMNS, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(b, widths)) for b in body]
    return "\n".join(lines) + "\n"


def format_csv(rows) -> str:
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        d = asdict(r)
        d["wall_time"] = f"{r.wall_time:.6f}"
        w.writerow(["" if d[c] is None else d[c] for c in BENCH_COLUMNS])
    return buf.getvalue()


def cmd_bench(args) -> int:
    problems = load_ngcut(args.ngcut, args.columns)
    tu = dict(REFERENCE_TU)
    if args.params:
        tu.update(read_params(args.params))
    wanted = args.only or list(range(1, len(problems) + 1))
    rows = []
    for k in wanted:
        if not 1 <= k <= len(problems):
            raise CliError(f"{resolve_path(args.ngcut)}: index {k} out of range 1..{len(problems)}")
        rows.extend(_bench_one(k, problems[k - 1], tu, args))
    sys.stdout.write(format_table(rows))
    text = format_csv(rows)
    if args.csv:
        _write(args.csv, text)
    else:
        sys.stdout.write("\n" + text)
    return 0


def cmd_render(args) -> int:
    inst, _ = load_instance(args)
    text = _read_text(args.solution)
    try:
        rec = ngio.read_solution(text)
    except ngio.ParseError as exc:
        raise CliError(f"{resolve_path(args.solution)}: {exc}") from None
    if rec.instance_name != inst.name:
        raise CliError(f"solution is for instance {rec.instance_name!r}, not {inst.name!r}")
    try:
        grid = ngio.render_ascii(inst, rec.placements)
        svg = ngio.render_svg(inst, rec.placements, scale=args.scale) if args.svg else None
    except ngio.InfeasiblePattern as exc:
        raise CliError(f"{resolve_path(args.solution)}: {exc}") from None
    sys.stdout.write(grid)
    if svg is not None:
        _write(args.svg, svg)
    return 0


def cmd_convert(args) -> int:
    problems = load_ngcut(args.ngcut, args.columns)
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"{out}: cannot create: {exc}") from None
    for inst in problems:
        path = out / f"{inst.name}.txt"
        _write(str(path), ngio.write_canonical(inst))
        print(path)
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ngcut", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    backend = dict(choices=sorted(BACKENDS), default=None, help="LP kernel (default: compiled if built)")

    sp = sub.add_parser("solve", help="run DCA on one instance")
    _add_source(sp)
    sp.add_argument("--t", type=_positive(float), default=None, help="penalty on non-integrality")
    sp.add_argument("--u", type=_positive(float), default=None, help="penalty on overlap in the start phase")
    sp.add_argument("--eps", type=_positive(float), default=1e-6, help="stop when the step is at most this")
    sp.add_argument("--max-iter", type=_positive(int), default=500)
    sp.add_argument("--init", choices=list(_INIT), default="initial-dca")
    sp.add_argument("--out", help="write the solution record here")
    sp.add_argument("--svg", help="write the pattern as SVG here")
    sp.add_argument("--trace", action="store_true", help="print F and step length per iteration")
    sp.add_argument("--backend", **backend)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("exact", help="branch and bound to a proved optimum")
    _add_source(sp)
    sp.add_argument("--time-limit", type=_positive(float), default=None, help="seconds")
    sp.add_argument("--out", help="write the solution record here")
    sp.add_argument("--backend", **backend)
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("bench", help="DCA (and optionally exact) over an ngcut file")
    sp.add_argument("--ngcut", required=True, help="OR-Library ngcut file")
    sp.add_argument("--columns", default=",".join(ngio.NGCUT_DEFAULT_ORDER),
                    help="per-piece column order of the ngcut file")
    sp.add_argument("--params", help="file of '<index> <t> <u>' lines overriding the built-in table")
    sp.add_argument("--only", type=int, nargs="+", help="problem numbers to run")
    sp.add_argument("--with-exact", action="store_true", help="also run branch and bound")
    sp.add_argument("--time-limit", type=_positive(float), default=None,
                    help="seconds per exact run")
    sp.add_argument("--csv", help="write CSV here instead of stdout")
    sp.add_argument("--backend", **backend)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("render", help="draw a solution record as text (and SVG)")
    _add_source(sp)
    sp.add_argument("--solution", required=True, help="solution record file")
    sp.add_argument("--svg", help="also write an SVG here")
    sp.add_argument("--scale", type=_positive(float), default=20.0, help="SVG pixels per unit")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("convert", help="split an ngcut file into canonical instance files")
    sp.add_argument("--ngcut", required=True, help="OR-Library ngcut file")
    sp.add_argument("--columns", default=",".join(ngio.NGCUT_DEFAULT_ORDER),
                    help="per-piece column order of the ngcut file")
    sp.add_argument("--out-dir", required=True, help="directory for one canonical file per problem")
    sp.set_defaults(func=cmd_convert)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
