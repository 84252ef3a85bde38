"""Vertex insertion: realizing routing tuples as drawings of K_{n+1}.

``realize`` turns an insertion candidate (a base drawing, an insertion
face and one routing per existing vertex) into the planarization of the
extended drawing.  Inside every face a routing contributes a chord
between two boundary points (or between the new vertex / the target
vertex and a boundary point); segments crossed by several routings need
a total order of crossing points, searched by backtracking; within each
face the chords must be pairwise non-interleaving, since edges at the
new vertex may not cross one another.  When no order of crossing points
works the tuple is entangled and realizes no drawing.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from . import canonical
from .drawing import Drawing, build_drawing
from .routing import DualGraph, Routing, enumerate_routings


class EntangledError(Exception):
    """The chosen routings force two new edges to cross."""


@dataclass(frozen=True)
class InsertionCandidate:
    base: Drawing
    face: int
    routings: tuple[Routing, ...]  # index i routes to target i+1

    @property
    def total_added(self) -> int:
        return sum(r.length for r in self.routings)


@dataclass
class RealizeInfo:
    new_vertex: int
    insertion_face: int
    face_map: dict[int, int]  # result face id -> base face id


def _check_candidate(cand: InsertionCandidate) -> None:
    base = cand.base
    n = base.n_real
    if len(cand.routings) != n:
        raise ValueError(f"need {n} routings, got {len(cand.routings)}")
    targets = sorted(r.target for r in cand.routings)
    if targets != list(range(1, n + 1)):
        raise ValueError(f"targets must be 1..{n}, got {targets}")
    for i, r in enumerate(cand.routings):
        if r.target != i + 1:
            raise ValueError("routings must be ordered by target")
        if r.origin_face != cand.face:
            raise ValueError(f"routing to {r.target} starts at face "
                             f"{r.origin_face}, not {cand.face}")
        at = cand.face
        seen_edges = set()
        for step, seg in enumerate(r.crossed):
            d, t = seg, base.twin[seg]
            sides = (base.face_of(d), base.face_of(t))
            if at not in sides:
                raise ValueError(f"routing to {r.target} crosses segment "
                                 f"{seg} away from face {at}")
            at = sides[1] if at == sides[0] else sides[0]
            if r.face_seq[step + 1] != at:
                raise ValueError("routing face sequence is inconsistent")
            e = base.edge[seg]
            if r.target in e:
                raise ValueError(f"routing to {r.target} crosses an edge "
                                 f"incident with its target")
            if e in seen_edges:
                raise ValueError(f"routing to {r.target} crosses edge {e} twice")
            seen_edges.add(e)
        fin = r.face_seq[-1]
        if r.target not in {base.origin[d] for d in base.face_cycles()[fin]}:
            raise ValueError(f"routing to {r.target} ends away from it")


def _interleave(a: int, b: int, c: int, d: int, size: int) -> bool:
    """Whether boundary chords (a,b) and (c,d) cross inside the face."""
    span = (b - a) % size
    c_in = 0 < (c - a) % size < span
    d_in = 0 < (d - a) % size < span
    return c_in != d_in


def _assignments(cand: InsertionCandidate):
    """Yield (drawing, info) for every consistent crossing-order choice.

    For routings from a common face to distinct targets the consistent
    choice is unique when it exists, but the search does not rely on
    that.
    """
    base = cand.base
    n = base.n_real
    routings = cand.routings
    f0 = cand.face
    cycles = base.face_cycles()
    rots = base.rotations()

    # crossing events, grouped by segment
    ev_routing: list[tuple[int, int]] = []
    ev_on_seg: dict[int, list[int]] = {}
    ev_id: dict[tuple[int, int], int] = {}
    for i, r in enumerate(routings):
        for j, seg in enumerate(r.crossed):
            ev_id[(i, j)] = len(ev_routing)
            ev_on_seg.setdefault(seg, []).append(len(ev_routing))
            ev_routing.append((i, j))

    # chords and star endpoints per face (independent of crossing orders)
    chords: dict[int, list[tuple]] = {}
    star_objs: list[tuple] = []
    for i, r in enumerate(routings):
        k = r.length
        for j, g in enumerate(r.face_seq):
            out_obj = (("e", ev_id[(i, j)]) if j < k else ("c", r.target))
            if j == 0:
                star_objs.append(out_obj)
            else:
                in_obj = ("e", ev_id[(i, j - 1)])
                chords.setdefault(g, []).append((in_obj, out_obj))
    faces_to_check = set(chords)
    faces_to_check.add(f0)

    def positions(g: int, order: dict[int, tuple[int, ...]]):
        """Boundary position of every corner and crossing event of face g."""
        pos: dict[tuple, int] = {}
        p = 0
        for d in cycles[g]:
            key = ("c", base.origin[d])
            if key not in pos:
                pos[key] = p
            p += 1
            seg = min(d, base.twin[d])
            evs = order.get(seg)
            if evs is None:
                evs = tuple(ev_on_seg.get(seg, ()))
            if d != seg:
                evs = tuple(reversed(evs))
            for ev in evs:
                pos[("e", ev)] = p
                p += 1
        return pos, p

    multi = sorted(s for s, evs in ev_on_seg.items() if len(evs) > 1)

    def consistent(order) -> dict[int, dict] | None:
        """Check chord non-interleaving; return per-face position maps."""
        maps = {}
        for g in sorted(faces_to_check):
            pos, size = positions(g, order)
            maps[g] = (pos, size)
            ch = [(pos[a], pos[b]) for a, b in chords.get(g, ())]
            for idx in range(len(ch)):
                a, b = ch[idx]
                for c, d in ch[idx + 1:]:
                    if _interleave(a, b, c, d, size):
                        return None
            if g == f0 and ch:
                spts = [maps[g][0][o] for o in star_objs]
                for a, b in ch:
                    span = (b - a) % size
                    sides = {(p - a) % size < span for p in spts}
                    if len(sides) > 1:
                        return None
        return maps

    def build(order, maps):
        twin_map: dict[tuple, tuple] = {}
        edge_map: dict[tuple, tuple] = {}
        nseg = {}  # events per dart, in dart direction
        for d in range(base.n_darts):
            seg = min(d, base.twin[d])
            evs = order.get(seg)
            if evs is None:
                evs = tuple(ev_on_seg.get(seg, ()))
            nseg[d] = evs if d == seg else tuple(reversed(evs))
        for d in range(base.n_darts):
            m = len(nseg[d])
            td = base.twin[d]
            for t in range(m + 1):
                twin_map[("p", d, t)] = ("p", td, m - t)
                edge_map[("p", d, t)] = base.edge[d]
        for i, r in enumerate(routings):
            e = (i + 1, n + 1)
            for j in range(r.length + 1):
                twin_map[("r", i, j, 0)] = ("r", i, j, 1)
                twin_map[("r", i, j, 1)] = ("r", i, j, 0)
                edge_map[("r", i, j, 0)] = e
                edge_map[("r", i, j, 1)] = e

        rot: dict = {}
        for v in range(1, n + 1):
            rot[v] = [("p", d, 0) for d in rots[v]]
        for u in range(n + 1, base.n_vertices + 1):
            rot[("d", u)] = [("p", d, 0) for d in rots[u]]
        # new edges reach their targets inside the final face's corner wedge
        for i, r in enumerate(routings):
            w = i + 1
            gk = r.face_seq[-1]
            spot = [idx for idx, d in enumerate(rots[w])
                    if base.face_of(d) == gk]
            assert len(spot) == 1
            rot[w].insert(spot[0], ("r", i, r.length, 1))
        # star order around the new vertex: clockwise = descending
        # boundary position inside the insertion face
        pos0 = maps[f0][0]
        star = sorted(range(len(routings)), key=lambda i: -pos0[star_objs[i]])
        rot[n + 1] = [("r", i, 0, 0) for i in star]
        # each crossing event becomes a degree-4 dummy
        for ev, (i, j) in enumerate(ev_routing):
            seg = routings[i].crossed[j]
            evs = order.get(seg) or tuple(ev_on_seg[seg])
            m = len(evs)
            q = evs.index(ev) + 1
            toward_head = ("p", seg, q)
            toward_origin = ("p", base.twin[seg], m - q + 1)
            back = ("r", i, j, 1)
            cont = ("r", i, j + 1, 0)
            if base.face_of(seg) == routings[i].face_seq[j]:
                rot[("e", ev)] = [toward_head, cont, toward_origin, back]
            else:
                rot[("e", ev)] = [toward_head, back, toward_origin, cont]

        result, ids = build_drawing(n + 1, rot, twin_map, edge_map,
                                    return_map=True)
        origin_dart = {v: k for k, v in ids.items()}
        face_map = {}
        for fid, cyc in enumerate(result.face_cycles()):
            for d in cyc:
                key = origin_dart[d]
                if key[0] == "p":
                    face_map[fid] = base.face_of(key[1])
                    break
            else:
                raise AssertionError("face bounded by new edges only")
        return result, RealizeInfo(n + 1, f0, face_map)

    if not multi:
        maps = consistent({})
        if maps is not None:
            yield build({}, maps)
        return
    choices = [list(permutations(ev_on_seg[s])) for s in multi]

    def rec(idx: int, order: dict):
        if idx == len(multi):
            maps = consistent(order)
            if maps is not None:
                yield build(order, maps)
            return
        for perm in choices[idx]:
            order[multi[idx]] = perm
            yield from rec(idx + 1, order)
        del order[multi[idx]]

    yield from rec(0, {})


def realize(cand: InsertionCandidate) -> Drawing:
    """The drawing of K_{n+1} realizing the candidate, or EntangledError."""
    _check_candidate(cand)
    for dr, _ in _assignments(cand):
        return dr
    raise EntangledError(f"no planar realization at face {cand.face}")


def realize_with_info(cand: InsertionCandidate,
                      trusted: bool = False) -> tuple[Drawing, RealizeInfo]:
    if not trusted:
        _check_candidate(cand)
    for dr, info in _assignments(cand):
        return dr, info
    raise EntangledError(f"no planar realization at face {cand.face}")


def realize_all(cand: InsertionCandidate,
                trusted: bool = False) -> list[tuple[Drawing, RealizeInfo]]:
    if not trusted:
        _check_candidate(cand)
    return list(_assignments(cand))


# ---------------------------------------------------------------------------
# Exhaustive extension
# ---------------------------------------------------------------------------


@dataclass
class Extension:
    drawing: Drawing
    info: RealizeInfo
    candidate: InsertionCandidate


def face_routing_lists(base: Drawing, dg: DualGraph, face: int, eps: int,
                       distinct_faces: bool, notes: list | None = None):
    """Per-vertex routing lists for one insertion face, or None if the
    face cannot stay within the budget.

    Enumeration runs in distinct-faces mode whenever the per-face slack
    stays within its completeness bound n-2; otherwise this face falls
    back to full dual-walk enumeration and the event is surfaced through
    ``notes``.
    """
    n = base.n_real
    dists = [dg.dist_map(w)[face] for w in range(1, n + 1)]
    sumd = sum(dists)
    if sumd > eps:
        return None
    slack = eps - sumd
    mode = distinct_faces
    if distinct_faces and slack > n - 2:
        mode = False
        if notes is not None:
            notes.append(f"face {face}: slack {slack} exceeds n-2={n - 2}; "
                         f"fell back to dual-walk enumeration")
    plists = []
    for w in range(1, n + 1):
        pl = enumerate_routings(base, face, w, dists[w - 1] + slack, mode,
                                dual_graph=dg)
        pl.sort(key=lambda r: (r.length, r.crossed))
        plists.append(pl)
    return plists, dists


def iter_extensions(base: Drawing, c: int, *, distinct_faces: bool = True,
                    faces: list[int] | None = None, notes: list | None = None):
    """Generate all extensions of ``base`` by one vertex with at most c
    crossings, one insertion-face representative per face orbit."""
    n = base.n_real
    eps = c - base.x
    if eps < 0:
        return
    dg = DualGraph(base)
    face_ids = faces if faces is not None else canonical.face_orbits(base)
    for f in face_ids:
        plan = face_routing_lists(base, dg, f, eps, distinct_faces, notes)
        if plan is None:
            continue
        plists, dists = plan
        if any(not pl for pl in plists):
            continue
        vorder = sorted(range(n), key=lambda i: len(plists[i]))
        rest_min = [0] * (n + 1)
        for idx in range(n - 1, -1, -1):
            rest_min[idx] = rest_min[idx + 1] + dists[vorder[idx]]
        chosen: list[Routing | None] = [None] * n

        def rec(idx: int, total: int):
            if idx == n:
                cand = InsertionCandidate(base, f, tuple(chosen))
                for dr, info in _assignments(cand):
                    yield Extension(dr, info, cand)
                return
            i = vorder[idx]
            for r in plists[i]:
                t = total + r.length
                if t + rest_min[idx + 1] > eps:
                    break  # routings sorted by length
                chosen[i] = r
                yield from rec(idx + 1, t)
            chosen[i] = None

        yield from rec(0, 0)


def extend_all(base: Drawing, c: int, *, distinct_faces: bool = True,
               faces: list[int] | None = None,
               notes: list | None = None) -> list[Drawing]:
    """All realizable one-vertex extensions with at most c crossings
    (not yet deduplicated by isomorphism)."""
    return [ext.drawing for ext in
            iter_extensions(base, c, distinct_faces=distinct_faces,
                            faces=faces, notes=notes)]


def minimality_filter(dr: Drawing, base_cr: int,
                      inserted: int | None = None) -> bool:
    """Keep ``dr`` only if no deletion other than the inserted vertex
    reaches below the crossing count of the base it was built from."""
    v_new = inserted if inserted is not None else dr.n_real
    for u in range(1, dr.n_real + 1):
        if u != v_new and dr.x - dr.crossings_at(u) < base_cr:
            return False
    return True
