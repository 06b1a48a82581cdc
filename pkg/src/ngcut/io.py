"""Instance and solution text formats, geometric feasibility, rendering.

Canonical instance format (ASCII, single spaces, LF)::

    name <text>
    stock <L> <W>
    pieces <m>
    <l> <w> <v> <b>        (m lines)
"""

from __future__ import annotations

import string
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from xml.sax.saxutils import escape

from .model import Instance, Piece


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 problem: int | None = None):
        self.line, self.column, self.problem = line, column, problem
        where = []
        if problem is not None:
            where.append(f"problem {problem}")
        if line is not None:
            where.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


def _int_field(tok: str, lineno: int, col: int, what: str, positive: bool = True) -> int:
    try:
        val = int(tok)
    except ValueError:
        raise ParseError(f"{what}: expected an integer, got {tok!r}", lineno, col) from None
    if positive and val < 1:
        raise ParseError(f"{what} must be >= 1, got {val}", lineno, col)
    return val


def _columns(line: str):
    """(token, 1-based column) pairs for a single-space separated line."""
    out, col = [], 1
    for tok in line.split(" "):
        out.append((tok, col))
        col += len(tok) + 1
    return out


# ---------------------------------------------------------------- canonical

def parse_canonical(text: str) -> Instance:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for k, ln in enumerate(lines, 1):
        if ln.endswith("\r"):
            raise ParseError("CR line ending; LF only", k)

    def expect(k: int, key: str, n_args: int | None):
        if k > len(lines):
            raise ParseError(f"missing '{key}' line", k)
        toks = _columns(lines[k - 1])
        if toks[0][0] != key:
            raise ParseError(f"expected '{key}', got {toks[0][0]!r}", k, 1)
        if n_args is not None and len(toks) - 1 != n_args:
            raise ParseError(f"'{key}' takes {n_args} fields, got {len(toks) - 1}", k)
        return toks[1:]

    name_line = lines[0] if lines else ""
    if not name_line.startswith("name "):
        raise ParseError("expected 'name <text>'", 1, 1)
    name = name_line[5:]
    if not name:
        raise ParseError("empty name", 1, 6)
    (lt, lc), (wt, wc) = expect(2, "stock", 2)
    L = _int_field(lt, 2, lc, "stock length")
    W = _int_field(wt, 2, wc, "stock width")
    ((mt, mc),) = expect(3, "pieces", 1)
    m = _int_field(mt, 3, mc, "piece count")
    pieces = []
    for k in range(4, 4 + m):
        if k > len(lines):
            raise ParseError(f"expected {m} piece lines, found {k - 4}", k)
        toks = _columns(lines[k - 1])
        if len(toks) != 4:
            raise ParseError(f"piece line needs 4 fields, got {len(toks)}", k)
        l, w, v, b = (_int_field(t, k, c, f) for (t, c), f in
                      zip(toks, ("length", "width", "value", "max_count")))
        pieces.append(Piece(l, w, v, b))
    if len(lines) > 3 + m:
        raise ParseError("trailing content after the last piece line", 4 + m)
    return Instance(L, W, tuple(pieces), name)


def write_canonical(instance: Instance) -> str:
    out = [f"name {instance.name}", f"stock {instance.stock_length} {instance.stock_width}",
           f"pieces {instance.m}"]
    out += [f"{pc.length} {pc.width} {pc.value} {pc.max_count}" for pc in instance.pieces]
    return "\n".join(out) + "\n"


def read_instance(path) -> Instance:
    with open(path, encoding="ascii") as fh:
        return parse_canonical(fh.read())


# ---------------------------------------------------------------- OR-Library

NGCUT_DEFAULT_ORDER = ("length", "width", "max_count", "value")


def parse_ngcut(text: str, column_order=NGCUT_DEFAULT_ORDER, name_prefix: str = "ngcut") -> list[Instance]:
    """Parse an OR-Library ngcut-style file.

    Layout: number of problems; then per problem a line with m, a line with
    ``L W`` and m piece lines. ``column_order`` names the piece fields in
    file order; use ``"-"`` for columns to ignore.
    """
    fields = tuple(column_order)
    needed = {"length", "width", "max_count", "value"}
    if not needed <= set(fields) or len([f for f in fields if f != "-"]) != 4:
        raise ValueError(f"column_order must name each of {sorted(needed)} once, got {fields}")
    rows = [(k, ln.split()) for k, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    pos = 0

    def take(n_tok: int, what: str, problem: int | None):
        nonlocal pos
        if pos >= len(rows):
            raise ParseError(f"unexpected end of file, expected {what}", None, None, problem)
        k, toks = rows[pos]
        if len(toks) != n_tok:
            raise ParseError(f"expected {what} ({n_tok} fields), got {len(toks)} fields",
                             k, None, problem)
        pos += 1
        vals = []
        for t in toks:
            try:
                vals.append(int(t))
            except ValueError:
                raise ParseError(f"non-integer field {t!r} in {what}", k, None, problem) from None
        if any(v < 0 for v in vals):
            raise ParseError(f"negative field in {what}", k, None, problem)
        return k, vals

    _, (n_prob,) = take(1, "number of problems", None)
    out = []
    for pi in range(1, n_prob + 1):
        k, (m,) = take(1, "piece count", pi)
        if m < 1:
            raise ParseError("piece count must be >= 1", k, None, pi)
        k, (L, W) = take(2, "stock dimensions", pi)
        pieces = []
        for j in range(m):
            k, vals = take(len(fields), f"piece line {j + 1} of {m}", pi)
            rec = {f: v for f, v in zip(fields, vals) if f != "-"}
            if min(rec.values()) < 1:
                raise ParseError("piece fields must be >= 1", k, None, pi)
            pieces.append(Piece(rec["length"], rec["width"], rec["value"], rec["max_count"]))
        out.append(Instance(L, W, tuple(pieces), f"{name_prefix}{pi}"))
    if pos != len(rows):
        raise ParseError("trailing content after the last problem", rows[pos][0])
    return out


# ---------------------------------------------------------------- feasibility

Placement = tuple  # (piece index, p, q)


@dataclass
class FeasibilityReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def feasibility_check(instance: Instance, placements) -> FeasibilityReport:
    """Purely geometric check: stock bounds, pairwise disjointness, counts."""
    rep = FeasibilityReport()
    L, W = instance.stock_length, instance.stock_width
    rects = []
    for k, (i, p, q) in enumerate(placements):
        if not 0 <= i < instance.m:
            rep.violations.append(f"placement {k}: unknown piece index {i}")
            continue
        pc = instance.pieces[i]
        if p < 0 or q < 0 or p + pc.length > L or q + pc.width > W:
            rep.violations.append(f"placement {k}: piece {i} at ({p},{q}) leaves the stock")
        rects.append((k, i, p, q, p + pc.length, q + pc.width))
    for (k1, i1, p1, q1, P1, Q1), (k2, i2, p2, q2, P2, Q2) in combinations(rects, 2):
        if p1 < P2 and p2 < P1 and q1 < Q2 and q2 < Q1:
            rep.violations.append(
                f"overlap: placements {k1} and {k2} both cover cell ({max(p1, p2)},{max(q1, q2)})"
            )
    counts = Counter(i for i, _, _ in placements)
    for i, c in sorted(counts.items()):
        if 0 <= i < instance.m and c > instance.pieces[i].max_count:
            rep.violations.append(f"availability: piece {i} used {c} times > {instance.pieces[i].max_count}")
    return rep


def placements_value(instance: Instance, placements) -> int:
    return sum(instance.pieces[i].value for i, _, _ in placements)


# ---------------------------------------------------------------- rendering

_LETTERS = string.ascii_uppercase + string.ascii_lowercase + string.digits


def piece_letter(i: int) -> str:
    return _LETTERS[i % len(_LETTERS)]


class InfeasiblePattern(ValueError):
    pass


def _require_feasible(instance, placements):
    rep = feasibility_check(instance, placements)
    if not rep:
        raise InfeasiblePattern("; ".join(rep.violations))


def render_ascii(instance: Instance, placements) -> str:
    """W lines of L characters; line s, column r is unit cell (r, s).
    Cells show the piece-type letter, '.' marks waste."""
    _require_feasible(instance, placements)
    grid = [["."] * instance.stock_length for _ in range(instance.stock_width)]
    for i, p, q in placements:
        pc = instance.pieces[i]
        for s in range(q, q + pc.width):
            grid[s][p:p + pc.length] = piece_letter(i) * pc.length
    return "\n".join("".join(row) for row in grid) + "\n"


def waste_cells(instance: Instance, placements) -> int:
    used = sum(instance.pieces[i].length * instance.pieces[i].width for i, _, _ in placements)
    return instance.stock_length * instance.stock_width - used


_PALETTE = ["#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
            "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f"]


def render_svg(instance: Instance, placements, scale: float = 20.0, margin: float = 2.0) -> str:
    _require_feasible(instance, placements)
    L, W = instance.stock_length, instance.stock_width
    width, height = L * scale + 2 * margin, W * scale + 2 * margin
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">',
        f"<title>{escape(instance.name)}</title>",
        f'<rect class="stock" x="{margin:g}" y="{margin:g}" width="{L * scale:g}" '
        f'height="{W * scale:g}" fill="white" stroke="black" stroke-width="2"/>',
    ]
    for i, p, q in placements:
        pc = instance.pieces[i]
        x, y = margin + p * scale, margin + q * scale
        w, h = pc.length * scale, pc.width * scale
        out.append(
            f'<g class="piece" data-piece="{i}" data-value="{pc.value}">'
            f'<rect x="{x:g}" y="{y:g}" width="{w:g}" height="{h:g}" '
            f'fill="{_PALETTE[i % len(_PALETTE)]}" stroke="black" stroke-width="1"/>'
            f'<text x="{x + w / 2:g}" y="{y + h / 2:g}" text-anchor="middle" '
            f'dominant-baseline="middle" font-size="{max(scale * 0.5, 6):g}">'
            f"{piece_letter(i)}{i} ({pc.value})</text></g>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- solutions

@dataclass
class SolutionRecord:
    instance_name: str
    placements: list
    total_value: int
    algorithm: str
    status: str = "feasible"
    t: float | None = None
    u: float | None = None
    epsilon: float | None = None
    init: str | None = None
    iterations: int = 0
    wall_time: float = 0.0

    def __post_init__(self):
        self.placements = [tuple(int(v) for v in pl) for pl in self.placements]


_HEADER = "# ngcut solution v1"
_KEYS = ("instance", "algorithm", "status", "total_value", "t", "u", "epsilon", "init",
         "iterations", "wall_time")


def write_solution(rec: SolutionRecord) -> str:
    """Key-value text; optional keys are omitted when unset. The
    ``placements <k>`` line is followed by k lines ``<i> <p> <q>``."""
    out = [_HEADER, f"instance {rec.instance_name}", f"algorithm {rec.algorithm}",
           f"status {rec.status}", f"total_value {rec.total_value}"]
    for key in ("t", "u", "epsilon"):
        val = getattr(rec, key)
        if val is not None:
            out.append(f"{key} {float(val)!r}")
    if rec.init is not None:
        out.append(f"init {rec.init}")
    out.append(f"iterations {rec.iterations}")
    out.append(f"wall_time {float(rec.wall_time)!r}")
    out.append(f"placements {len(rec.placements)}")
    out += [f"{i} {p} {q}" for i, p, q in rec.placements]
    return "\n".join(out) + "\n"


def read_solution(text: str) -> SolutionRecord:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != _HEADER:
        raise ParseError(f"missing header {_HEADER!r}", 1)
    vals: dict[str, str] = {}
    k = 1
    placements = None
    while k < len(lines):
        ln = lines[k]
        key, _, rest = ln.partition(" ")
        if key == "placements":
            cnt = _int_field(rest, k + 1, 12, "placement count", positive=False)
            placements = []
            for j in range(cnt):
                idx = k + 2 + j
                if idx > len(lines):
                    raise ParseError(f"expected {cnt} placement lines, found {j}", idx)
                toks = lines[idx - 1].split(" ")
                if len(toks) != 3:
                    raise ParseError("placement line needs '<i> <p> <q>'", idx)
                placements.append(tuple(_int_field(t, idx, None, "placement field", positive=False)
                                        for t in toks))
            k += 1 + cnt
            if k < len(lines):
                raise ParseError("trailing content after placements", k + 1)
            break
        if key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", k + 1, 1)
        if key in vals:
            raise ParseError(f"duplicate key {key!r}", k + 1, 1)
        vals[key] = rest
        k += 1
    if placements is None:
        raise ParseError("missing placements section", len(lines))
    for req in ("instance", "algorithm", "total_value"):
        if req not in vals:
            raise ParseError(f"missing required key {req!r}")
    try:
        return SolutionRecord(
            instance_name=vals["instance"],
            placements=placements,
            total_value=int(vals["total_value"]),
            algorithm=vals["algorithm"],
            status=vals.get("status", "feasible"),
            t=float(vals["t"]) if "t" in vals else None,
            u=float(vals["u"]) if "u" in vals else None,
            epsilon=float(vals["epsilon"]) if "epsilon" in vals else None,
            init=vals.get("init"),
            iterations=int(vals.get("iterations", 0)),
            wall_time=float(vals.get("wall_time", 0.0)),
        )
    except ValueError as exc:
        raise ParseError(f"bad value: {exc}") from None
