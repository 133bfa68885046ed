"""Index file format and bit-level space accounting.

Layout (all integers little-endian)::

    magic "RMXI" | u32 version | u8 little-endian flag (1) | u32 section count
    section table: per section u8 name length, name, u64 offset, u64 length, u32 crc32
    section bodies, in table order

Sections: ``globals``, ``tree`` (config and the pre-order node table with
each node's offsets into the other sections), ``leaves``, ``matrices``,
``skeleton`` and ``payload1`` .. ``payload5`` (the 2-sided index bit strings,
four orientations per internal node).
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Optional

from .binio import FormatError, Reader, Writer
from .global_index import Globals
from .index import RangeMaxIndex
from .influence import encode_priorities
from .tree import ORIENTATIONS, BuildConfig, Node, SquareMatrix, attach_providers
from .two_sided import TwoSidedIndex, payload_budgets
from .slabs import NodeHeader

MAGIC = b"RMXI"
VERSION = 1
SECTIONS = ("globals", "tree", "leaves", "matrices", "skeleton",
            "payload1", "payload2", "payload3", "payload4", "payload5")
_NODE_FIELDS = ("x_lo", "x_hi", "y_lo", "y_hi", "n", "level", "k",
                "leaves", "matrices", "skeleton",
                "payload1", "payload2", "payload3", "payload4", "payload5")


def _write_matrix(w: Writer, mat: SquareMatrix) -> None:
    w.u32(mat.m)
    w.ints(mat.cell_x, signed=True)
    w.ints(mat.cell_y, signed=True)
    w.ints(mat.cell_p, signed=True)
    for row in mat.encode_levels():
        w.ints(row)


def _read_matrix(r: Reader) -> SquareMatrix:
    m = r.u32()
    cx = r.ints(signed=True)
    cy = r.ints(signed=True)
    cp = r.ints(signed=True)
    if not len(cx) == len(cy) == len(cp) == m * m:
        raise FormatError("matrix cell arrays have the wrong size")
    lg = m.bit_length() - 1
    levels = [r.ints() for _ in range((lg + 1) ** 2 - 1)]
    try:
        return SquareMatrix.from_levels(m, cx, cy, cp, levels)
    except ValueError as e:
        raise FormatError(str(e)) from None


def index_sections(ix: RangeMaxIndex) -> dict[str, bytes]:
    ws = {name: Writer() for name in SECTIONS}
    ix.g.write(ws["globals"])
    cols: dict[str, list[int]] = {f: [] for f in _NODE_FIELDS}
    for node in ix.root.walk():
        h = node.header
        for f, v in zip(("x_lo", "x_hi", "y_lo", "y_hi", "n", "level", "k"),
                        (h.x_lo, h.x_hi, h.y_lo, h.y_hi, h.n, node.level, node.k)):
            cols[f].append(v)
        for name in SECTIONS[2:]:
            cols[name].append(ws[name].size)
        if node.is_leaf:
            ws["leaves"].ints(node.leaf_xs)
            continue
        _write_matrix(ws["matrices"], node.matrix)
        for idx in node.two_sided:
            idx.write_skeleton(ws["skeleton"])
            for item in "12345":
                idx.write_payload(item, ws["payload" + item])
    t = ws["tree"]
    cfg = ix.cfg
    for v in (cfg.n, cfg.n_pad, cfg.L, cfg.base_threshold, cfg.lambda_override or 0):
        t.u64(v)
    t.u64(len(cols["n"]))
    for f in _NODE_FIELDS:
        t.ints(cols[f])
    return {name: w.getvalue() for name, w in ws.items()}


def dumps(ix: RangeMaxIndex) -> bytes:
    sections = index_sections(ix)
    names = list(sections)
    table_size = sum(1 + len(nm) + 8 + 8 + 4 for nm in names)
    offset = 4 + 4 + 1 + 4 + table_size
    head = Writer()
    head.raw(MAGIC)
    head.u32(VERSION)
    head.u8(1)
    head.u32(len(names))
    for nm in names:
        body = sections[nm]
        head.u8(len(nm))
        head.raw(nm.encode())
        head.u64(offset)
        head.u64(len(body))
        head.u32(zlib.crc32(body))
        offset += len(body)
    return head.getvalue() + b"".join(sections[nm] for nm in names)


def read_sections(data: bytes) -> dict[str, bytes]:
    r = Reader(data)
    if r.raw(4) != MAGIC:
        raise FormatError("not an index file (bad magic)")
    version = r.u32()
    if version != VERSION:
        raise FormatError(f"unsupported index version {version}")
    if r.u8() != 1:
        raise FormatError("index file is not little-endian")
    out = {}
    for _ in range(r.u32()):
        name = r.raw(r.u8()).decode()
        off, length, crc = r.u64(), r.u64(), r.u32()
        if off + length > len(data):
            raise FormatError(f"section {name} runs past the end of the file")
        body = data[off:off + length]
        if zlib.crc32(body) != crc:
            raise FormatError(f"checksum mismatch in section {name}")
        out[name] = body
    missing = [s for s in SECTIONS if s not in out]
    if missing:
        raise FormatError(f"missing sections: {', '.join(missing)}")
    return out


def loads(data: bytes) -> RangeMaxIndex:
    sec = read_sections(data)
    g = Globals.read(Reader(sec["globals"]))
    t = Reader(sec["tree"])
    n, n_pad, L, base, lam_o = (t.u64() for _ in range(5))
    cfg = BuildConfig(n, n_pad, L, base, lam_o or None)
    count = t.u64()
    cols = {f: t.ints() for f in _NODE_FIELDS}
    if any(len(v) != count for v in cols.values()):
        raise FormatError("node table columns have different lengths")
    readers = {name: Reader(sec[name]) for name in SECTIONS[2:]}
    pos = [0]

    def load_node() -> Node:
        i = pos[0]
        if i >= count:
            raise FormatError("node table ends early")
        pos[0] += 1
        for name in SECTIONS[2:]:
            if readers[name].pos != cols[name][i]:
                raise FormatError(f"node {i}: {name} offset mismatch")
        header = NodeHeader(cols["x_lo"][i], cols["x_hi"][i], cols["y_lo"][i], cols["y_hi"][i], cols["n"][i])
        node = Node(header, cols["level"][i])
        k = cols["k"][i]
        if k == 0:
            node.leaf_xs = readers["leaves"].ints()
            return node
        node.k = k
        node.matrix = _read_matrix(readers["matrices"])
        for _ in ORIENTATIONS:
            pr = {item: readers["payload" + item] for item in "12345"}
            node.two_sided.append(TwoSidedIndex.read(readers["skeleton"], pr))
        m = header.n // k
        vch = [load_node() for _ in range(m)]
        hch = [load_node() for _ in range(m)]
        node.set_children(vch, hch)
        attach_providers(g, node, cfg.lam(header.n))
        return node

    root = load_node()
    if pos[0] != count or any(not rd.at_end() for rd in readers.values()):
        raise FormatError("trailing data after the node table")
    return RangeMaxIndex(cfg, g, root)


def save(ix: RangeMaxIndex, path: str) -> int:
    data = dumps(ix)
    with open(path, "wb") as f:
        f.write(data)
    return len(data)


def load(path: str) -> RangeMaxIndex:
    with open(path, "rb") as f:
        return loads(f.read())


@dataclass
class SpaceReport:
    """Bits per file section and the outcome of each space bound check."""

    file_bytes: int
    components: dict[str, int]
    framing_bits: int
    checks: list[tuple[str, float, float, bool]] = field(default_factory=list)

    def reconciles(self) -> bool:
        return sum(self.components.values()) + self.framing_bits == 8 * self.file_bytes

    def to_csv(self) -> str:
        lines = ["kind,name,value,limit,ok"]
        for name, bits in self.components.items():
            lines.append(f"component,{name},{bits},,")
        lines.append(f"component,framing,{self.framing_bits},,")
        lines.append(f"total,file_bits,{8 * self.file_bytes},,{int(self.reconciles())}")
        for name, value, limit, ok in self.checks:
            lines.append(f"check,{name},{value:g},{limit:g},{int(ok)}")
        return "\n".join(lines)


def space_report(ix: RangeMaxIndex, ps=None, data: Optional[bytes] = None) -> SpaceReport:
    """Per-section bit counts of the serialized index plus bound checks.

    ``ps`` defaults to the point set stored in the index; it feeds the
    whole-set entropy-code check.
    """
    if ps is None:
        ps = ix.points()
    if data is None:
        data = dumps(ix)
    sec = read_sections(data)
    comps = {name: 8 * len(sec[name]) for name in SECTIONS}
    framing = 8 * len(data) - sum(comps.values())
    rep = SpaceReport(len(data), comps, framing)
    worst: dict[str, float] = {}
    for node in ix.root.walk():
        for idx in node.two_sided:
            for name, (value, limit) in payload_budgets(idx).items():
                worst[name] = max(worst.get(name, 0.0), value / limit)
    for name, ratio in worst.items():
        rep.checks.append((name + "_over_budget", round(ratio, 4), 1.0, ratio <= 1.0))
    code = encode_priorities(ps)
    rep.checks.append(("entropy_code_bits_over_3n", round(code.bit_length / (3 * ps.n), 4),
                       1.0, code.bit_length <= 3 * ps.n))
    return rep
