"""Planarized rotation systems for good drawings of complete graphs.

A drawing of K_n on the sphere is stored through its planarization:
every crossing becomes a degree-4 dummy vertex, every edge of K_n
becomes a path of segments, and the embedding is a clockwise rotation
system on darts (half-segments).

Dart conventions:
  * ``twin[d]``  -- the other half of the same segment,
  * ``nxt[d]``   -- clockwise successor around ``origin[d]``,
  * face walk    -- ``d -> nxt[twin[d]]``; the face of ``d`` lies to
    its left when walking along the dart.

Real vertices are labelled ``1..n_real``, dummies
``n_real+1..n_real+x``.  Every edge path is oriented away from its
smaller endpoint and ``seg`` counts segments from 0 there.  Normalized
drawings additionally number segments by ``(lo, hi, seg)`` so that a
segment ``s`` owns darts ``2s`` (forward) and ``2s+1`` (backward); two
equal labelled drawings then serialize to identical bytes.

Drawings are immutable after construction; operations that "modify"
a drawing (``delete_vertex``) build and return fresh values.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class FileFormatError(ValueError):
    """Raised when a drawing record cannot be parsed at all."""


@dataclass(frozen=True)
class Face:
    """A face of the planarization: the dart cycle of one face walk."""

    id: int
    darts: tuple[int, ...]


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


class Drawing:
    """Immutable planarized drawing of K_n (see module docstring)."""

    __slots__ = (
        "n_real", "x", "origin", "twin", "nxt", "edge", "seg",
        "_faces", "_face_of", "_rotations", "_dummy_pairs", "_cr_at",
    )

    def __init__(self, n_real, x, origin, twin, nxt, edge, seg):
        self.n_real = n_real
        self.x = x
        self.origin = tuple(origin)
        self.twin = tuple(twin)
        self.nxt = tuple(nxt)
        self.edge = tuple(edge)
        self.seg = tuple(seg)
        self._faces = None
        self._face_of = None
        self._rotations = None
        self._dummy_pairs = None
        self._cr_at = None

    # -- basic counts ------------------------------------------------

    @property
    def n_darts(self) -> int:
        return len(self.twin)

    @property
    def n_segments(self) -> int:
        return len(self.twin) // 2

    @property
    def n_vertices(self) -> int:
        return self.n_real + self.x

    def is_real(self, v: int) -> bool:
        return 1 <= v <= self.n_real

    # -- derived structure (cached) ------------------------------------

    def face_cycles(self) -> tuple[tuple[int, ...], ...]:
        """Orbits of the face walk d -> nxt[twin[d]], in min-dart order."""
        if self._faces is None:
            twin, nxt = self.twin, self.nxt
            nd = len(nxt)
            face_of = [-1] * nd
            cycles = []
            for d0 in range(nd):
                if face_of[d0] >= 0:
                    continue
                fid = len(cycles)
                cyc = []
                d = d0
                while 0 <= d < nd and face_of[d] < 0:
                    face_of[d] = fid
                    cyc.append(d)
                    d = nxt[twin[d]]
                cycles.append(tuple(cyc))
            self._faces = tuple(cycles)
            self._face_of = tuple(face_of)
        return self._faces

    def face_of(self, d: int) -> int:
        if self._face_of is None:
            self.face_cycles()
        return self._face_of[d]

    def rotations(self) -> dict[int, tuple[int, ...]]:
        """Clockwise dart cycle around each vertex, starting at its min dart."""
        if self._rotations is None:
            by_vertex: dict[int, list[int]] = {}
            for d, v in enumerate(self.origin):
                by_vertex.setdefault(v, []).append(d)
            rots = {}
            nd = self.n_darts
            for v, darts in by_vertex.items():
                d0 = min(darts)
                cyc = [d0]
                d = self.nxt[d0]
                while 0 <= d < nd and d != d0 and len(cyc) <= len(darts):
                    cyc.append(d)
                    d = self.nxt[d]
                rots[v] = tuple(cyc)
            self._rotations = rots
        return self._rotations

    def dummy_pairs(self) -> dict[int, tuple[tuple[int, int], tuple[int, int]]]:
        """For each dummy vertex, the unordered pair of K_n edges crossing there."""
        if self._dummy_pairs is None:
            pairs = {}
            for v, rot in self.rotations().items():
                if self.is_real(v):
                    continue
                edges = sorted({self.edge[d] for d in rot})
                pairs[v] = tuple(edges)
            self._dummy_pairs = pairs
        return self._dummy_pairs

    def crossings_at(self, v: int) -> int:
        """Number of crossings involving an edge incident with real vertex v."""
        if not self.is_real(v):
            raise ValueError(f"vertex {v} is not a real vertex")
        if self._cr_at is None:
            cr = [0] * (self.n_real + 1)
            for pair in self.dummy_pairs().values():
                for e in pair:
                    for u in e:
                        if 1 <= u <= self.n_real:
                            cr[u] += 1
            self._cr_at = tuple(cr)
        return self._cr_at[v]

    def edge_paths(self) -> dict[tuple[int, int], list[int]]:
        """Per edge, the forward dart of each segment, in path order from
        the smaller endpoint."""
        start = {}
        for v in range(1, self.n_real + 1):
            for d in self.rotations()[v]:
                if self.edge[d][0] == v:
                    start[self.edge[d]] = d
        out = {}
        for e, d in start.items():
            fwds = [d]
            while True:
                t = self.twin[d]
                u = self.origin[t]
                if self.is_real(u):
                    break
                d = next(k for k in self.rotations()[u]
                         if self.edge[k] == e and k != t)
                fwds.append(d)
            out[e] = fwds
        return out

    def __repr__(self) -> str:
        return f"Drawing(K_{self.n_real}, x={self.x})"


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def build_drawing(n_real, rotations, twin_map, edge_map, return_map=False):
    """Assemble a normalized Drawing from a rotation system on dart keys.

    ``rotations`` maps each vertex key to its clockwise list of dart
    keys; real vertices must already be keyed 1..n_real, dummies may use
    any hashable key.  ``twin_map`` pairs the dart keys of each segment
    and ``edge_map`` gives the K_n edge (a, b), a < b, of every dart.
    Segment indices and the canonical dummy/dart numbering are derived
    here, so callers only need a consistent rotation structure.  With
    ``return_map`` the key -> dart id mapping is returned as well.
    """
    origin_map = {}
    for v, rot in rotations.items():
        for k in rot:
            if k in origin_map:
                raise ValueError(f"dart key {k!r} listed twice")
            origin_map[k] = v

    edges = sorted(set(edge_map.values()))
    # one dart per (real vertex, edge): locate path starts
    start_of = {}
    for k, v in origin_map.items():
        if isinstance(v, int) and 1 <= v <= n_real:
            e = edge_map[k]
            if v == e[0]:
                if e in start_of:
                    raise ValueError(f"edge {e} has two starting darts")
                start_of[e] = k

    # trace edge paths; per-edge ordered segments as (fwd_key, bwd_key)
    seg_of_key = {}
    paths = {}
    for e in edges:
        a, b = e
        d = start_of.get(e)
        if d is None:
            raise ValueError(f"edge {e} has no dart at vertex {a}")
        segs = []
        seen = set()
        while True:
            t = twin_map[d]
            k = len(segs)
            seg_of_key[d] = k
            seg_of_key[t] = k
            segs.append((d, t))
            u = origin_map[t]
            if isinstance(u, int) and 1 <= u <= n_real:
                if u != b:
                    raise ValueError(f"edge {e} path ends at vertex {u}")
                break
            if u in seen:
                raise ValueError(f"edge {e} revisits crossing {u!r}")
            seen.add(u)
            cont = [k2 for k2 in rotations[u] if edge_map[k2] == e and k2 != t]
            if len(cont) != 1:
                raise ValueError(f"edge {e} does not continue through {u!r}")
            d = cont[0]
        paths[e] = segs

    # canonical dummy order: by the sorted pair of (edge, lower seg index)
    dummy_key = {}
    for v, rot in rotations.items():
        if isinstance(v, int) and 1 <= v <= n_real:
            continue
        incidences: dict[tuple[int, int], int] = {}
        for k in rot:
            e = edge_map[k]
            s = seg_of_key[k]
            incidences[e] = min(s, incidences.get(e, s))
        dummy_key[v] = tuple(sorted(incidences.items()))
    ordered_dummies = sorted(dummy_key, key=dummy_key.get)
    if len(set(dummy_key.values())) != len(ordered_dummies):
        raise ValueError("two crossings share the same (edge, seg) signature")
    vid = {v: n_real + 1 + i for i, v in enumerate(ordered_dummies)}
    for v in range(1, n_real + 1):
        vid[v] = v

    # canonical segment order -> dart ids 2s / 2s+1
    dart_id = {}
    seg_list = sorted((e, i) for e in edges for i in range(len(paths[e])))
    for s, (e, i) in enumerate(seg_list):
        fwd, bwd = paths[e][i]
        dart_id[fwd] = 2 * s
        dart_id[bwd] = 2 * s + 1

    nd = 2 * len(seg_list)
    origin = [0] * nd
    twin = [0] * nd
    nxt = [0] * nd
    edge = [None] * nd
    seg = [0] * nd
    for k, i in dart_id.items():
        origin[i] = vid[origin_map[k]]
        twin[i] = dart_id[twin_map[k]]
        edge[i] = edge_map[k]
        seg[i] = seg_of_key[k]
    for v, rot in rotations.items():
        ids = [dart_id[k] for k in rot]
        for i, d in enumerate(ids):
            nxt[d] = ids[(i + 1) % len(ids)]
    dr = Drawing(n_real, len(ordered_dummies), origin, twin, nxt, edge, seg)
    return (dr, dart_id) if return_map else dr


def seed_k4() -> Drawing:
    """The unique crossing-free good drawing of K_4 on the sphere."""
    rot = {
        1: [(1, 2), (1, 3), (1, 4)],
        2: [(2, 1), (2, 4), (2, 3)],
        3: [(3, 2), (3, 4), (3, 1)],
        4: [(4, 2), (4, 1), (4, 3)],
    }
    twin = {}
    edge = {}
    for u in range(1, 5):
        for w in range(1, 5):
            if u != w:
                twin[(u, w)] = (w, u)
                edge[(u, w)] = (min(u, w), max(u, w))
    return build_drawing(4, rot, twin, edge)


def relabel(dr: Drawing, perm: dict[int, int]) -> Drawing:
    """Rename real vertices by ``perm`` (a bijection on 1..n), keeping the embedding."""
    rot = {}
    for v, cyc in dr.rotations().items():
        key = perm[v] if dr.is_real(v) else ("d", v)
        rot[key] = list(cyc)
    twin = {d: dr.twin[d] for d in range(dr.n_darts)}
    edge = {}
    for d in range(dr.n_darts):
        a, b = dr.edge[d]
        a, b = perm[a], perm[b]
        edge[d] = (min(a, b), max(a, b))
    return build_drawing(dr.n_real, rot, twin, edge)


def mirror(dr: Drawing) -> Drawing:
    """The reflected drawing: every rotation reversed."""
    rot = {}
    for v, cyc in dr.rotations().items():
        key = v if dr.is_real(v) else ("d", v)
        rot[key] = list(reversed(cyc))
    twin = {d: dr.twin[d] for d in range(dr.n_darts)}
    edge = {d: dr.edge[d] for d in range(dr.n_darts)}
    return build_drawing(dr.n_real, rot, twin, edge)


def normalize(dr: Drawing) -> Drawing:
    """Rebuild with canonical dummy/dart numbering (idempotent)."""
    rot = {}
    for v, cyc in dr.rotations().items():
        key = v if dr.is_real(v) else ("d", v)
        rot[key] = list(cyc)
    twin = {d: dr.twin[d] for d in range(dr.n_darts)}
    edge = {d: dr.edge[d] for d in range(dr.n_darts)}
    return build_drawing(dr.n_real, rot, twin, edge)


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


def faces(dr: Drawing) -> list[Face]:
    """All faces of the planarization under the twin-then-next walk."""
    return [Face(i, cyc) for i, cyc in enumerate(dr.face_cycles())]


def crossing_pairs(dr: Drawing) -> frozenset[tuple[tuple[int, int], tuple[int, int]]]:
    """The set of unordered pairs of K_n edges that cross, one per dummy."""
    return frozenset(dr.dummy_pairs().values())


def crossings_at(dr: Drawing, v: int) -> int:
    return dr.crossings_at(v)


def delete_vertex(dr: Drawing, v: int) -> Drawing:
    """The drawing of K_{n-1} obtained by removing real vertex v.

    Crossings on edges at v disappear; the other edge through each such
    crossing has its two segments fused.  Remaining real vertices are
    renumbered 1..n-1 preserving order.
    """
    if dr.n_real == 4:
        raise ValueError("refusing to delete from K_4")
    if not dr.is_real(v):
        raise ValueError(f"vertex {v} is not a real vertex")

    dead_edges = {e for d in range(dr.n_darts) for e in (dr.edge[d],) if v in e}
    dead_dummies = {u for u, pair in dr.dummy_pairs().items()
                    if pair[0] in dead_edges or pair[1] in dead_edges}

    # fuse each surviving edge across runs of dying crossings: the darts
    # at the two live ends of every run become twins, everything between
    # is dropped
    twin: dict[int, int] = {}
    for e, fwds in dr.edge_paths().items():
        if e in dead_edges:
            continue
        pending = None
        for f in fwds:
            b = dr.twin[f]
            if dr.origin[f] not in dead_dummies:
                pending = f
            if dr.origin[b] not in dead_dummies:
                twin[pending] = b
                twin[b] = pending
                pending = None

    perm = {u: u - (u > v) for u in range(1, dr.n_real + 1)}
    rot = {}
    for u, cyc in dr.rotations().items():
        if u == v or u in dead_dummies:
            continue
        key = perm[u] if dr.is_real(u) else ("d", u)
        rot[key] = [d for d in cyc if d in twin]
    edge = {}
    for d in twin:
        a, b = dr.edge[d]
        a, b = perm[a], perm[b]
        edge[d] = (min(a, b), max(a, b))
    return build_drawing(dr.n_real - 1, rot, twin, edge)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate(dr: Drawing) -> ValidationReport:
    """Check every structural and goodness invariant; never raises.

    Violations name the failed invariant together with witness dart or
    vertex ids.
    """
    bad: list[str] = []
    nd = dr.n_darts

    if not (len(dr.origin) == len(dr.nxt) == len(dr.edge) == len(dr.seg) == nd):
        bad.append("structure: dart arrays have inconsistent lengths")
        return ValidationReport(False, bad)
    if nd % 2:
        bad.append("structure: odd number of darts")

    for d in range(nd):
        t = dr.twin[d]
        if not 0 <= t < nd or t == d or dr.twin[t] != d:
            bad.append(f"structure: twin is not a fixed-point-free involution at dart {d}")
            return ValidationReport(False, bad)
        if dr.edge[t] != dr.edge[d] or dr.seg[t] != dr.seg[d]:
            bad.append(f"structure: darts {d},{t} of one segment disagree on edge/seg")

    if sorted(dr.nxt) != list(range(nd)):
        bad.append("structure: next is not a permutation of the darts")
        return ValidationReport(False, bad)

    # rotation cycles must be exactly the vertex stars
    seen = [False] * nd
    degree: dict[int, int] = {}
    for d0 in range(nd):
        if seen[d0]:
            continue
        v = dr.origin[d0]
        cnt = 0
        d = d0
        while not seen[d]:
            seen[d] = True
            cnt += 1
            if dr.origin[d] != v:
                bad.append(f"rotation: cycle through dart {d0} mixes vertices "
                           f"{v} and {dr.origin[d]}")
            d = dr.nxt[d]
        if v in degree:
            bad.append(f"rotation: vertex {v} has more than one rotation cycle")
        degree[v] = degree.get(v, 0) + cnt

    n, x = dr.n_real, dr.x
    verts = set(degree)
    if verts != set(range(1, n + x + 1)):
        bad.append(f"structure: vertex ids are {sorted(verts)}, expected 1..{n + x}")
        return ValidationReport(False, bad)

    for v in range(1, n + 1):
        if degree[v] != n - 1:
            bad.append(f"degree: real vertex {v} has degree {degree[v]}, expected {n - 1}")
        touching = [dr.edge[d] for d in dr.rotations()[v]]
        if len(set(touching)) != len(touching):
            bad.append(f"degree: real vertex {v} meets some edge twice")
        for e in touching:
            if v not in e:
                bad.append(f"degree: real vertex {v} carries dart of foreign edge {e}")

    pair_seen: dict[tuple, int] = {}
    for u in range(n + 1, n + x + 1):
        if degree[u] != 4:
            bad.append(f"degree: dummy {u} has degree {degree[u]}, expected 4")
            continue
        rot = dr.rotations()[u]
        e0, e1, e2, e3 = (dr.edge[d] for d in rot)
        if not (e0 == e2 and e1 == e3 and e0 != e1):
            bad.append(f"goodness: dummy {u} rotation does not alternate two edges")
            continue
        if set(e0) & set(e1):
            bad.append(f"goodness: adjacent edges cross at dummy {u} ({e0} and {e1})")
        key = tuple(sorted((e0, e1)))
        if key in pair_seen:
            bad.append(f"goodness: edges cross twice ({e0} and {e1}, "
                       f"dummies {pair_seen[key]} and {u})")
        pair_seen[key] = u

    # every edge's segments must chain lo -> hi through dummies
    by_edge: dict[tuple[int, int], list[int]] = {}
    for d in range(0, nd):
        by_edge.setdefault(dr.edge[d], []).append(d)
    expected_edges = {(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)}
    if set(by_edge) != expected_edges:
        bad.append("structure: edge set differs from K_n edge set")
    for e, darts in sorted(by_edge.items()):
        if e not in expected_edges:
            continue
        k = len(darts) // 2
        segs: dict[int, list[int]] = {}
        for d in darts:
            segs.setdefault(dr.seg[d], []).append(d)
        if sorted(segs) != list(range(k)):
            bad.append(f"path: edge {e} has segment indices {sorted(segs)}")
            continue
        ok_chain = True
        at = e[0]
        for i in range(k):
            ends = segs[i]
            if len(ends) != 2:
                bad.append(f"path: edge {e} segment {i} has {len(ends)} darts")
                ok_chain = False
                break
            o1, o2 = dr.origin[ends[0]], dr.origin[ends[1]]
            if o1 == at:
                at = o2
            elif o2 == at:
                at = o1
            else:
                bad.append(f"path: edge {e} breaks at segment {i}")
                ok_chain = False
                break
            if i < k - 1 and dr.is_real(at):
                bad.append(f"path: edge {e} passes through real vertex {at}")
                ok_chain = False
                break
        if ok_chain and at != e[1]:
            bad.append(f"path: edge {e} ends at {at} instead of {e[1]}")

    if x != len([u for u in verts if u > n]):
        bad.append(f"structure: header x={x} but {len(verts) - n} dummies present")

    # Euler formula and connectivity on the sphere
    nf = len(dr.face_cycles())
    if (n + x) - nd // 2 + nf != 2:
        bad.append(f"euler: V-E+F = {(n + x) - nd // 2 + nf}, expected 2")
    if nd:
        reach = {0}
        stack = [0]
        while stack:
            d = stack.pop()
            for d2 in (dr.twin[d], dr.nxt[d]):
                if d2 not in reach:
                    reach.add(d2)
                    stack.append(d2)
        if len(reach) != nd:
            bad.append("structure: planarization is not connected")

    return ValidationReport(not bad, bad)


# ---------------------------------------------------------------------------
# Serialization (one drawing per record, ASCII, byte-comparable)
# ---------------------------------------------------------------------------


def to_text(dr: Drawing) -> str:
    lines = [f"D n={dr.n_real} x={dr.x}"]
    rots = dr.rotations()
    for v in range(1, dr.n_real + dr.x + 1):
        lines.append(f"V {v}: " + ",".join(str(d) for d in rots[v]))
    for d in range(dr.n_darts):
        a, b = dr.edge[d]
        lines.append(f"H {d} twin={dr.twin[d]} edge={a}-{b} seg={dr.seg[d]}")
    lines.append(".")
    return "\n".join(lines) + "\n"


def _parse_record(lines: list[str]) -> Drawing:
    head = lines[0].split()
    if len(head) != 3 or head[0] != "D":
        raise FileFormatError(f"bad header: {lines[0]!r}")
    try:
        n_real = int(head[1].removeprefix("n="))
        x = int(head[2].removeprefix("x="))
    except ValueError as exc:
        raise FileFormatError(f"bad header: {lines[0]!r}") from exc

    rot: dict[int, list[int]] = {}
    hline: dict[int, tuple[int, tuple[int, int], int]] = {}
    for ln in lines[1:]:
        if ln.startswith("V "):
            head_part, _, tail = ln[2:].partition(":")
            try:
                v = int(head_part)
                darts = [int(t) for t in tail.strip().split(",") if t]
            except ValueError as exc:
                raise FileFormatError(f"bad vertex line: {ln!r}") from exc
            if v in rot:
                raise FileFormatError(f"vertex {v} listed twice")
            rot[v] = darts
        elif ln.startswith("H "):
            parts = ln.split()
            try:
                d = int(parts[1])
                fields = dict(p.split("=", 1) for p in parts[2:])
                t = int(fields["twin"])
                a, b = (int(u) for u in fields["edge"].split("-"))
                s = int(fields["seg"])
            except (ValueError, KeyError, IndexError) as exc:
                raise FileFormatError(f"bad dart line: {ln!r}") from exc
            if d in hline:
                raise FileFormatError(f"dart {d} listed twice")
            hline[d] = (t, (min(a, b), max(a, b)), s)
        else:
            raise FileFormatError(f"unexpected line: {ln!r}")

    nd = len(hline)
    if sorted(hline) != list(range(nd)):
        raise FileFormatError("dart ids are not 0..D-1")
    origin = [-1] * nd
    nxt = [0] * nd
    for v, darts in rot.items():
        for i, d in enumerate(darts):
            if not 0 <= d < nd:
                raise FileFormatError(f"vertex {v} lists unknown dart {d}")
            if origin[d] != -1:
                raise FileFormatError(f"dart {d} has two origins")
            origin[d] = v
            nxt[d] = darts[(i + 1) % len(darts)]
    if -1 in origin:
        raise FileFormatError(f"dart {origin.index(-1)} has no origin")
    twin = [hline[d][0] for d in range(nd)]
    edge = [hline[d][1] for d in range(nd)]
    seg = [hline[d][2] for d in range(nd)]
    if any(not 0 <= t < nd for t in twin):
        raise FileFormatError("twin id out of range")
    return Drawing(n_real, x, origin, twin, nxt, edge, seg)


def iter_records(text: str):
    """Yield (record_index, Drawing | FileFormatError) for each record in text."""
    buf: list[str] = []
    idx = 0
    for raw in text.splitlines():
        ln = raw.strip()
        if not ln:
            continue
        if ln == ".":
            try:
                yield idx, _parse_record(buf)
            except FileFormatError as exc:
                yield idx, exc
            idx += 1
            buf = []
        else:
            buf.append(ln)
    if buf:
        yield idx, FileFormatError("record not terminated by '.'")


def loads(text: str) -> list[Drawing]:
    """Parse all records, raising on the first malformed one."""
    out = []
    for _, rec in iter_records(text):
        if isinstance(rec, FileFormatError):
            raise rec
        out.append(rec)
    return out


def load_file(path) -> list[Drawing]:
    with open(path, "r", encoding="ascii") as fh:
        return loads(fh.read())


def dumps(drawings) -> str:
    return "".join(to_text(d) for d in drawings)


def write_file(path, drawings) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps(drawings))
