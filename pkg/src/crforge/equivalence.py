"""Crossed-edge-set equivalence of routings and representative extension.

Routings to the same target are equivalent when they cross the same set
of edges; a drawing built from one representative per class stands in
for every drawing built from members of the same classes (its crossing
pairs are identical).  Extension by class products is what keeps the
large stages tractable: the output contains a representative of every
equivalence class of extensions, at the price of not being
isomorphism-deduplicated.

A product of representatives can in principle be entangled even though
other members realize fine.  Representatives are then retried over
alternative members (bounded); only if all fail is the event recorded
in the error set, which marks the base drawing for full product-level
processing.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from itertools import islice, product

from . import canonical
from .drawing import Drawing
from .extension import (EntangledError, InsertionCandidate, RealizeInfo,
                        face_routing_lists, realize_with_info)
from .routing import DualGraph, Routing

RETRY_LIMIT = 256


@dataclass(frozen=True)
class EquivalenceClass:
    key: tuple  # sorted tuple of crossed K_n edges
    members: tuple[Routing, ...]

    @property
    def representative(self) -> Routing:
        return self.members[0]

    @property
    def length(self) -> int:
        return len(self.key)

    def key_text(self) -> str:
        return ",".join(f"{a}-{b}" for a, b in self.key) or "none"


def partition_classes(routings) -> list[EquivalenceClass]:
    """Group routings by crossed-edge set; classes in lexicographic key order."""
    groups: dict[tuple, list[Routing]] = {}
    for r in routings:
        groups.setdefault(tuple(sorted(r.edge_set)), []).append(r)
    return [EquivalenceClass(k, tuple(v)) for k, v in sorted(groups.items())]


def select_representative(cls: EquivalenceClass,
                          preferred: int | None = None) -> Routing:
    """A member passing through the preferred face when one exists,
    otherwise the deterministic first member."""
    if preferred is not None:
        for r in cls.members:
            if r.passes_through(preferred):
                return r
    return cls.representative


@dataclass(frozen=True)
class ErrorRecord:
    base_hash: str
    face: int
    class_keys: tuple

    def line(self) -> str:
        keys = ";".join(",".join(f"{a}-{b}" for a, b in key) or "none"
                        for key in self.class_keys)
        return f"E base={self.base_hash} face={self.face} classes={keys}"


@dataclass
class ErrorSet:
    """Append-only log of entangled representative products."""

    records: list[ErrorRecord] = field(default_factory=list)

    def add(self, base_hash: str, face: int, class_keys: tuple) -> None:
        self.records.append(ErrorRecord(base_hash, face, class_keys))

    def merge(self, other: "ErrorSet") -> None:
        self.records.extend(other.records)

    def __len__(self) -> int:
        return len(self.records)

    def __bool__(self) -> bool:
        return bool(self.records)

    def to_text(self) -> str:
        return "".join(rec.line() + "\n" for rec in self.records)


def drawing_hash(dr: Drawing) -> str:
    return hashlib.sha256(canonical.canonical_code(dr)).hexdigest()[:16]


@dataclass
class RepExtension:
    """One realized class-product extension, with enough context to
    re-select representatives later."""

    drawing: Drawing
    info: RealizeInfo
    candidate: InsertionCandidate
    face: int
    classes: tuple[EquivalenceClass, ...]  # chosen class per target
    retried: bool = False


def _retry_members(base, face, classes, skip, limit=RETRY_LIMIT,
                   member_lists=None):
    """Try alternative members of the involved classes, bounded."""
    lists = member_lists or [cls.members for cls in classes]
    for combo in islice(product(*lists), limit):
        if combo == skip:
            continue
        cand = InsertionCandidate(base, face, combo)
        try:
            return cand, realize_with_info(cand, trusted=True)
        except EntangledError:
            continue
    return None


def iter_representative_extensions(base: Drawing, c: int,
                                   preferred: int | None = None, *,
                                   faces: list[int] | None = None,
                                   notes: list | None = None,
                                   errors: ErrorSet | None = None):
    """Class-product extensions of ``base`` (one realized drawing per
    product of equivalence classes within budget), yielding RepExtension.

    The representative of each class prefers a routing through
    ``preferred`` (default: the insertion face itself).
    """
    n = base.n_real
    eps = c - base.x
    if eps < 0:
        return
    dg = DualGraph(base)
    face_ids = faces if faces is not None else canonical.face_orbits(base)
    base_hash = None
    for f in face_ids:
        plan = face_routing_lists(base, dg, f, eps, True, notes)
        if plan is None:
            continue
        plists, dists = plan
        if any(not pl for pl in plists):
            continue
        pref = preferred if preferred is not None else f
        class_lists = []
        for pl in plists:
            cl = partition_classes(pl)
            cl.sort(key=lambda cls: (cls.length, cls.key))
            class_lists.append(cl)
        reps = [[select_representative(cls, pref) for cls in cl]
                for cl in class_lists]
        vorder = sorted(range(n), key=lambda i: len(class_lists[i]))
        rest_min = [0] * (n + 1)
        for idx in range(n - 1, -1, -1):
            rest_min[idx] = rest_min[idx + 1] + class_lists[vorder[idx]][0].length
        chosen: list[int] = [0] * n

        def rec(idx: int, total: int):
            if idx == n:
                cls_tuple = tuple(class_lists[i][chosen[i]] for i in range(n))
                rep_tuple = tuple(reps[i][chosen[i]] for i in range(n))
                cand = InsertionCandidate(base, f, rep_tuple)
                try:
                    dr, info = realize_with_info(cand, trusted=True)
                    yield RepExtension(dr, info, cand, f, cls_tuple)
                except EntangledError:
                    alt = _retry_members(base, f, cls_tuple, rep_tuple)
                    if alt is not None:
                        cand2, (dr, info) = alt
                        yield RepExtension(dr, info, cand2, f, cls_tuple, True)
                    elif errors is not None:
                        nonlocal base_hash
                        if base_hash is None:
                            base_hash = drawing_hash(base)
                        errors.add(base_hash, f,
                                   tuple(cls.key for cls in cls_tuple))
                return
            i = vorder[idx]
            for ci, cls in enumerate(class_lists[i]):
                t = total + cls.length
                if t + rest_min[idx + 1] > eps:
                    break  # classes sorted by length
                chosen[i] = ci
                yield from rec(idx + 1, t)
            return

        yield from rec(0, 0)


def extend_representatives(base: Drawing, c: int,
                           preferred: int | None = None, *,
                           faces: list[int] | None = None,
                           notes: list | None = None):
    """All class-product extensions within budget, plus the error set."""
    errors = ErrorSet()
    out = [ext.drawing for ext in
           iter_representative_extensions(base, c, preferred, faces=faces,
                                          notes=notes, errors=errors)]
    return out, errors
