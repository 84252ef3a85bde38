"""Canonical codes and isomorphism handling for planarized drawings.

Two drawings are isomorphic when a homeomorphism of the sphere
(orientation preserving or reversing) maps one planarization onto the
other, respecting the real/dummy vertex split; real labels are ignored.
For connected embedded maps a breadth-first traversal code rooted at a
dart is a complete invariant, so the canonical code is the minimum
traversal code over a relabelling-invariant set of root darts, taken in
both orientations.  The code is decodable: ``drawing_from_code``
rebuilds the drawing, which makes deduplicated output independent of
discovery order.
"""

from __future__ import annotations

from array import array

from .drawing import Drawing, build_drawing

CanonicalCode = bytes

_NEW_REAL = -2
_NEW_DUMMY = -3
_END = -1


def _invert(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def _traversal(origin, twin, nxt, n_real, start) -> tuple[int, ...]:
    """Rooted BFS code; equal codes <=> equal rooted oriented maps."""
    label = {origin[start]: 0}
    entry = [start]
    code = [_NEW_DUMMY if origin[start] > n_real else _NEW_REAL]
    qi = 0
    while qi < len(entry):
        d0 = entry[qi]
        qi += 1
        d = d0
        while True:
            t = twin[d]
            head = origin[t]
            lb = label.get(head)
            if lb is None:
                label[head] = len(entry)
                entry.append(t)
                code.append(_NEW_DUMMY if head > n_real else _NEW_REAL)
            else:
                code.append(lb)
            d = nxt[d]
            if d == d0:
                break
        code.append(_END)
    return tuple(code)


def _face_lengths(twin, nxt) -> list[int]:
    """Per-dart length of the face walk orbit through the dart."""
    nd = len(nxt)
    out = [0] * nd
    seen = [False] * nd
    for d0 in range(nd):
        if seen[d0]:
            continue
        cyc = []
        d = d0
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = nxt[twin[d]]
        ln = len(cyc)
        for d in cyc:
            out[d] = ln
    return out


def _root_candidates(origin, twin, nxt, n_real) -> list[int]:
    """A nonempty relabelling-invariant set of darts (argmin local invariant)."""
    flen = _face_lengths(twin, nxt)
    best = None
    cands: list[int] = []
    for d in range(len(nxt)):
        iv = (origin[d] > n_real, origin[twin[d]] > n_real,
              flen[d], flen[twin[d]], flen[nxt[d]])
        if best is None or iv < best:
            best = iv
            cands = [d]
        elif iv == best:
            cands.append(d)
    return cands


def _min_code(dr: Drawing) -> tuple[int, ...]:
    best = None
    for nxt in (dr.nxt, _invert(dr.nxt)):
        for d in _root_candidates(dr.origin, dr.twin, nxt, dr.n_real):
            code = _traversal(dr.origin, dr.twin, nxt, dr.n_real, d)
            if best is None or code < best:
                best = code
    return best


def canonical_code(dr: Drawing) -> bytes:
    """Relabelling- and reflection-invariant complete identifier of a drawing."""
    code = _min_code(dr)
    packed = array("h", [dr.n_real, dr.x])
    packed.extend(v + 4 for v in code)  # shift so all entries are >= 0
    return packed.tobytes()


def code_hex(code: bytes) -> str:
    return code.hex()


def code_from_hex(text: str) -> bytes:
    return bytes.fromhex(text)


def drawing_from_code(code: bytes) -> Drawing:
    """Rebuild the (normalized) drawing a canonical code encodes."""
    vals = array("h")
    vals.frombytes(code)
    n_real = vals[0]
    tokens = [v - 4 for v in vals[2:]]

    # neighbour lists in rotation order, vertices in traversal order
    colors = [tokens[0]]
    rots: list[list[int]] = [[]]
    at = 0
    for tok in tokens[1:]:
        if tok == _END:
            at += 1
        elif tok in (_NEW_REAL, _NEW_DUMMY):
            nb = len(colors)
            colors.append(tok)
            rots.append([])
            rots[at].append(nb)
        else:
            rots[at].append(tok)

    real_ids = {}
    dummy_keys = {}
    for v, col in enumerate(colors):
        if col == _NEW_REAL:
            real_ids[v] = len(real_ids) + 1
        else:
            dummy_keys[v] = ("d", v)
    assert len(real_ids) == n_real

    def key(v):
        return real_ids.get(v) or dummy_keys[v]

    darts = {(v, i): None for v, rot in enumerate(rots) for i in range(len(rot))}
    twin_map = {}
    for (v, i) in darts:
        u = rots[v][i]
        j = rots[u].index(v)  # planarizations are simple graphs
        twin_map[(v, i)] = (u, j)

    # recover K_n edges by walking straight through dummies
    edge_map = {}
    for v, col in enumerate(colors):
        if col != _NEW_REAL:
            continue
        for i in range(len(rots[v])):
            if (v, i) in edge_map:
                continue
            path = [(v, i)]
            cur = (v, i)
            while True:
                u, j = twin_map[cur]
                path.append((u, j))
                if colors[u] == _NEW_REAL:
                    break
                cur = (u, (j + 2) % 4)
                path.append(cur)
            a = real_ids[v]
            b = real_ids[path[-1][0]]
            e = (min(a, b), max(a, b))
            for dk in path:
                edge_map[dk] = e

    rotations = {key(v): [(v, i) for i in range(len(rot))]
                 for v, rot in enumerate(rots)}
    return build_drawing(n_real, rotations, twin_map, edge_map)


# ---------------------------------------------------------------------------
# Face orbits
# ---------------------------------------------------------------------------


def face_orbits(dr: Drawing) -> list[int]:
    """One face id per orbit of the (reflection-inclusive) automorphism group.

    Faces share an orbit exactly when some automorphism of the drawing
    maps one onto the other; the rooted code of a face is the minimum
    traversal code over roots on that face, in both orientations.
    """
    cycles = dr.face_cycles()
    prev = _invert(dr.nxt)
    groups: dict[tuple[int, ...], int] = {}
    reps = []
    for fid, cyc in enumerate(cycles):
        best = None
        for d in cyc:
            code = _traversal(dr.origin, dr.twin, dr.nxt, dr.n_real, d)
            if best is None or code < best:
                best = code
        for d in cyc:
            # in the mirror the same geometric face is walked by the twins
            code = _traversal(dr.origin, dr.twin, prev, dr.n_real, dr.twin[d])
            if code < best:
                best = code
        if best not in groups:
            groups[best] = fid
            reps.append(fid)
    return reps


# ---------------------------------------------------------------------------
# Dedup store
# ---------------------------------------------------------------------------


class DedupStore:
    """Set of canonical codes with merge/persist support."""

    def __init__(self, codes=()) -> None:
        self.codes: set[bytes] = set(codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __contains__(self, code: bytes) -> bool:
        return code in self.codes

    def insert_if_new(self, code: bytes) -> bool:
        if code in self.codes:
            return False
        self.codes.add(code)
        return True

    def merge(self, other: "DedupStore") -> None:
        self.codes |= other.codes

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            for code in sorted(self.codes):
                fh.write(code.hex() + "\n")

    @classmethod
    def load(cls, path) -> "DedupStore":
        with open(path, "r", encoding="ascii") as fh:
            return cls(bytes.fromhex(ln.strip()) for ln in fh if ln.strip())


def insert_if_new(store: DedupStore, code: bytes) -> bool:
    return store.insert_if_new(code)
