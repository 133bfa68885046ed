"""Command-line front end.

Points files (text): a header line ``N`` then ``N`` lines ``x y priority``,
each column a permutation of ``0..N-1``. Binary points files hold the same
three columns (magic ``RMXP``). Queries files hold one ``x1 y1 x2 y2`` per
line, inclusive, with ``*`` for an open side. Blank lines and ``#`` comments
are ignored in both text formats.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Optional, Sequence, TextIO

from .binio import FormatError, Reader, Writer
from .core import NEG_INF, POS_INF, PointSet, QueryRect, brute_force_max, random_pointset, random_rect
from .index import RangeMaxIndex
from .serialize import dumps, load, loads, save, space_report
from .tree import TreeStats, candidate_bound

POINTS_MAGIC = b"RMXP"
POINTS_VERSION = 1
BENCH_HEADER = "n,depth,build_s,index_bytes,queries,mean_query_us,mean_candidates,max_candidates,candidate_bound"


class InputError(Exception):
    """Malformed user input; the message carries the file/line diagnostics."""


def _data_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _int(tok: str, where: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InputError(f"{where}: expected an integer, got {tok!r}") from None


def parse_points(text: str, name: str = "<points>") -> PointSet:
    lines = list(_data_lines(text))
    if not lines:
        raise InputError(f"{name}: empty points file")
    lineno, head = lines[0]
    if len(head) != 1:
        raise InputError(f"{name}:{lineno}: header must be a single integer N")
    n = _int(head[0], f"{name}:{lineno}")
    if n < 1:
        raise InputError(f"{name}:{lineno}: N must be positive")
    if len(lines) - 1 != n:
        raise InputError(f"{name}: header says {n} points, found {len(lines) - 1}")
    cols: list[list[int]] = [[], [], []]
    for lineno, toks in lines[1:]:
        if len(toks) != 3:
            raise InputError(f"{name}:{lineno}: expected 'x y priority', got {len(toks)} fields")
        for f, (col, tok) in enumerate(zip(cols, toks), 1):
            col.append(_int(tok, f"{name}:{lineno} field {f}"))
    return _points_from_columns(*cols, name=name)


def _points_from_columns(xs, ys, ps, name: str) -> PointSet:
    n = len(xs)
    for label, col in (("x", xs), ("y", ys), ("priority", ps)):
        seen = [False] * n
        for i, v in enumerate(col):
            if not 0 <= v < n or seen[v]:
                raise InputError(f"{name}: {label} column is not a permutation of 0..{n - 1} "
                                 f"(point {i}: {v})")
            seen[v] = True
    return PointSet.from_triples(list(zip(xs, ys, ps)))


def format_points(ps: PointSet) -> str:
    return "\n".join([str(ps.n)] + [f"{x} {y} {p}" for x, y, p in ps.triples()]) + "\n"


def points_to_bytes(ps: PointSet) -> bytes:
    w = Writer()
    w.raw(POINTS_MAGIC)
    w.u32(POINTS_VERSION)
    xs, ys, pr = zip(*ps.triples())
    for col in (xs, ys, pr):
        w.ints(col)
    return w.getvalue()


def points_from_bytes(data: bytes, name: str = "<points>") -> PointSet:
    try:
        r = Reader(data)
        if r.raw(4) != POINTS_MAGIC:
            raise InputError(f"{name}: not a binary points file (bad magic)")
        if r.u32() != POINTS_VERSION:
            raise InputError(f"{name}: unsupported points file version")
        xs, ys, pr = r.ints(), r.ints(), r.ints()
    except FormatError as e:
        raise InputError(f"{name}: {e}") from None
    if not len(xs) == len(ys) == len(pr) or not xs:
        raise InputError(f"{name}: column lengths differ or are empty")
    return _points_from_columns(xs, ys, pr, name=name)


def read_points(path: str, fmt: str) -> PointSet:
    if fmt == "binary":
        with open(path, "rb") as f:
            return points_from_bytes(f.read(), path)
    with open(path) as f:
        return parse_points(f.read(), path)


def write_points(ps: PointSet, path: Optional[str], fmt: str, out: Optional[TextIO] = None) -> None:
    out = out or sys.stdout
    if fmt == "binary":
        if path is None:
            out.buffer.write(points_to_bytes(ps))
        else:
            with open(path, "wb") as f:
                f.write(points_to_bytes(ps))
    elif path is None:
        out.write(format_points(ps))
    else:
        with open(path, "w") as f:
            f.write(format_points(ps))


def parse_queries(text: str, name: str = "<queries>") -> list[QueryRect]:
    out = []
    for lineno, toks in _data_lines(text):
        if len(toks) != 4:
            raise InputError(f"{name}:{lineno}: expected 'x1 y1 x2 y2', got {len(toks)} fields")
        v = [None if t == "*" else _int(t, f"{name}:{lineno} field {f}") for f, t in enumerate(toks, 1)]
        out.append(QueryRect(NEG_INF if v[0] is None else v[0], POS_INF if v[2] is None else v[2],
                             NEG_INF if v[1] is None else v[1], POS_INF if v[3] is None else v[3]))
    return out


def format_answer(c) -> str:
    return "NONE" if c is None else f"{c.x} {c.y} {c.priority}"


def _random_queries(n: int, count: int, rng: random.Random) -> list[QueryRect]:
    return [random_rect(n, rng, rng.choice((2, 3, 4))) for _ in range(count)]


def _load_or_build(args) -> tuple[RangeMaxIndex, PointSet]:
    if args.index:
        ix = load(args.index)
        return ix, ix.points()
    if args.input:
        ps = read_points(args.input, args.format)
    else:
        ps = random_pointset(args.n, random.Random(args.seed))
    return RangeMaxIndex.build(ps, args.base_threshold, args.lambda_override), ps


def cmd_gen(args, out: TextIO) -> int:
    write_points(random_pointset(args.n, random.Random(args.seed)), args.out, args.format, out)
    return 0


def cmd_build(args, out: TextIO) -> int:
    if not args.input or not args.out:
        raise InputError("build needs --input and --out")
    ps = read_points(args.input, args.format)
    ix = RangeMaxIndex.build(ps, args.base_threshold, args.lambda_override)
    size = save(ix, args.out)
    print(f"wrote {args.out}: {size} bytes, N={ps.n}, depth={ix.depth}", file=sys.stderr)
    return 0


def cmd_query(args, out: TextIO) -> int:
    if not args.queries or not (args.index or args.input):
        raise InputError("query needs --queries and one of --index / --input")
    ix, _ = _load_or_build(args)
    with open(args.queries) as f:
        qs = parse_queries(f.read(), args.queries)
    out.write("".join(format_answer(ix.query(q)) + "\n" for q in qs))
    return 0


def cmd_verify(args, out: TextIO) -> int:
    ix, ps = _load_or_build(args)
    # Answer from a reloaded copy so the file format is exercised too.
    ix = loads(dumps(ix))
    if args.queries:
        with open(args.queries) as f:
            qs = parse_queries(f.read(), args.queries)
    else:
        qs = _random_queries(ps.n, args.trials, random.Random(args.seed + 1))
    bad = 0
    for q in qs:
        got, want = ix.query(q), brute_force_max(ps, q)
        if got != want:
            bad += 1
            if bad <= 10:
                print(f"mismatch: query {q} got {format_answer(got)} expected {format_answer(want)}",
                      file=sys.stderr)
    out.write(f"queries {len(qs)}\nmismatches {bad}\n")
    return 1 if bad else 0


def cmd_bench(args, out: TextIO) -> int:
    out.write(BENCH_HEADER + "\n")
    for n in args.sizes:
        rng = random.Random(args.seed + n)
        ps = random_pointset(n, rng)
        t0 = time.perf_counter()
        ix = RangeMaxIndex.build(ps, args.base_threshold, args.lambda_override)
        build_s = time.perf_counter() - t0
        size = len(dumps(ix))
        qs = _random_queries(n, args.trials, rng)
        cands = []
        t0 = time.perf_counter()
        for q in qs:
            st = TreeStats()
            ix.query(q, st)
            cands.append(st.candidates)
        elapsed = time.perf_counter() - t0
        out.write(f"{n},{ix.depth},{build_s:.3f},{size},{len(qs)},{1e6 * elapsed / max(len(qs), 1):.1f},"
                  f"{sum(cands) / max(len(cands), 1):.2f},{max(cands, default=0)},{candidate_bound(ix.depth)}\n")
        out.flush()
    return 0


def cmd_space(args, out: TextIO) -> int:
    ix, ps = _load_or_build(args)
    if args.index:
        with open(args.index, "rb") as f:
            data = f.read()
    else:
        data = dumps(ix)
    rep = space_report(ix, ps, data)
    if args.json:
        for name, bits in rep.components.items():
            out.write(json.dumps({"kind": "component", "name": name, "bits": bits}) + "\n")
        out.write(json.dumps({"kind": "component", "name": "framing", "bits": rep.framing_bits}) + "\n")
        out.write(json.dumps({"kind": "total", "name": "file_bits", "bits": 8 * rep.file_bytes,
                              "reconciles": rep.reconciles()}) + "\n")
        for name, value, limit, ok in rep.checks:
            out.write(json.dumps({"kind": "check", "name": name, "value": value,
                                  "limit": limit, "ok": ok}) + "\n")
    else:
        out.write(rep.to_csv() + "\n")
    return 0 if rep.reconciles() and all(c[3] for c in rep.checks) else 1


COMMANDS = {"gen": cmd_gen, "build": cmd_build, "query": cmd_query, "verify": cmd_verify,
            "bench": cmd_bench, "space": cmd_space}


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--sizes wants comma-separated integers, got {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("--sizes needs positive sizes")
    return sizes


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rangemax", description="Static 2D range-maxima index in rank space.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--n", type=_positive, default=64, help="points to generate (gen, verify, space)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help="points file")
    p.add_argument("--queries", help="queries file")
    p.add_argument("--index", help="index file to read")
    p.add_argument("--out", help="output file (gen: points, build: index)")
    p.add_argument("--lambda-override", type=_positive, default=None)
    p.add_argument("--base-threshold", type=_positive, default=None)
    p.add_argument("--format", choices=("text", "binary"), default="text", help="points file format")
    p.add_argument("--trials", type=_positive, default=1000, help="random queries (verify, bench)")
    p.add_argument("--sizes", type=_sizes, default=[1024, 2048, 4096, 8192], help="bench sizes, e.g. 1024,2048")
    p.add_argument("--json", action="store_true", help="space: JSON lines instead of CSV")
    return p


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    args = make_parser().parse_args(argv)
    out = out or sys.stdout
    try:
        return COMMANDS[args.command](args, out)
    except (InputError, FormatError, OSError) as e:
        print(f"rangemax {args.command}: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
