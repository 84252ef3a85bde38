"""Dual-graph routing: where a new edge can run and what it must cross.

A routing records the curve of a prospective new edge from a face F to
an existing vertex w as the ordered list of segments it crosses; it is
a walk in the dual graph (faces as nodes, one arc per segment).  The
enumerator is exhaustive up to ``max_len`` and deterministic
(lexicographic in crossed segment ids).  Distances are breadth-first
lower bounds that ignore the crossed-edges-distinct constraint; the
enumerator restores exactness.
"""

from __future__ import annotations

from dataclasses import dataclass

from .drawing import Drawing

_INF = 1 << 30


@dataclass(frozen=True)
class Routing:
    origin_face: int
    target: int
    crossed: tuple[int, ...]        # segment ids (smaller dart id of each)
    face_seq: tuple[int, ...]       # faces visited, origin first
    edge_set: frozenset             # underlying K_n edges crossed

    @property
    def length(self) -> int:
        return len(self.crossed)

    def passes_through(self, face: int) -> bool:
        return face in self.face_seq

    def dump(self) -> str:
        segs = ",".join(str(s) for s in self.crossed)
        return (f"R F={self.origin_face} w={self.target} "
                f"len={self.length}: {segs}")


class DualGraph:
    """Faces as nodes, segments as arcs, with per-target distance maps."""

    def __init__(self, dr: Drawing):
        self.drawing = dr
        cycles = dr.face_cycles()
        self.n_faces = len(cycles)
        self.adj: list[list[tuple[int, tuple, int]]] = []
        self.face_vertices: list[frozenset] = []
        for cyc in cycles:
            arcs = []
            verts = set()
            for d in cyc:
                seg = min(d, dr.twin[d])
                other = dr.face_of(dr.twin[d])
                arcs.append((seg, dr.edge[d], other))
                v = dr.origin[d]
                if dr.is_real(v):
                    verts.add(v)
            arcs.sort()
            self.adj.append(arcs)
            self.face_vertices.append(frozenset(verts))
        self._dist: dict[int, list[int]] = {}

    @property
    def n_arcs(self) -> int:
        return self.drawing.n_darts // 2

    def dist_map(self, w: int) -> list[int]:
        """Distance from every face to the nearest face incident with w,
        never crossing an edge incident with w."""
        cached = self._dist.get(w)
        if cached is not None:
            return cached
        dist = [_INF] * self.n_faces
        frontier = [f for f in range(self.n_faces) if w in self.face_vertices[f]]
        for f in frontier:
            dist[f] = 0
        step = 0
        while frontier:
            step += 1
            nxt = []
            for f in frontier:
                for _, e, g in self.adj[f]:
                    if w in e:
                        continue
                    if dist[g] > step:
                        dist[g] = step
                        nxt.append(g)
            frontier = nxt
        self._dist[w] = dist
        return dist


def dual(dr: Drawing) -> DualGraph:
    return DualGraph(dr)


def distances(dr: Drawing, face: int, w: int, *,
              dual_graph: DualGraph | None = None) -> int:
    """Length of the shortest admissible dual walk from ``face`` to ``w``."""
    dg = dual_graph or DualGraph(dr)
    return dg.dist_map(w)[face]


def enumerate_routings(dr: Drawing, face: int, w: int, max_len: int,
                       distinct_faces: bool = True, *,
                       dual_graph: DualGraph | None = None) -> list[Routing]:
    """All routings from ``face`` to ``w`` of length at most ``max_len``.

    Soundness: crossed edges are pairwise distinct and never incident
    with the target.  With ``distinct_faces`` the walk may not revisit a
    face (complete for per-edge slack up to n-2); without it, all dual
    walks are searched.  Output order is lexicographic in the crossed
    segment ids, shorter prefixes first.
    """
    dg = dual_graph or DualGraph(dr)
    dist = dg.dist_map(w)
    out: list[Routing] = []
    if dist[face] > max_len:
        return out
    fverts = dg.face_vertices
    adj = dg.adj

    crossed: list[int] = []
    fseq: list[int] = [face]
    used: list[tuple] = []
    visited = {face}

    def rec(at: int) -> None:
        if w in fverts[at]:
            out.append(Routing(face, w, tuple(crossed), tuple(fseq),
                               frozenset(used)))
        budget = max_len - len(crossed) - 1
        if budget < 0:
            return
        for seg, e, g in adj[at]:
            if w in e or e in used:
                continue
            if distinct_faces and g in visited:
                continue
            if dist[g] > budget:
                continue
            crossed.append(seg)
            fseq.append(g)
            used.append(e)
            if distinct_faces:
                visited.add(g)
            rec(g)
            crossed.pop()
            fseq.pop()
            used.pop()
            if distinct_faces:
                visited.discard(g)
        return

    rec(face)
    return out
