"""Exact integer arithmetic around crossing-number budgets.

Everything here follows from the counting identity

    (n - 4) * cr(D) = sum over vertices v of cr(D - v)

(each crossing survives in exactly n-4 of the n vertex deletions),
plus the parity theorem for complete graphs on an odd number of
vertices, used as a budget-tightening assumption.  No floating point
anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass

from .drawing import Drawing

# Smallest crossing counts of K_n established in the literature (exact
# values are proven up to n = 11; n = 12 follows from n = 11 by the
# counting identity: 8*cr >= 12*100 forces 150, which is attained).
KNOWN_CR = {1: 0, 2: 0, 3: 0, 4: 0, 5: 1, 6: 3, 7: 9, 8: 18,
            9: 36, 10: 60, 11: 100, 12: 150}


class InconsistentSystem(ValueError):
    """The symmetric deletion system has no integer solution."""


def zed(n: int) -> int:
    """The conjectured crossing number Z(n) of K_n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    prod = (n // 2) * ((n - 1) // 2) * ((n - 2) // 2) * ((n - 3) // 2)
    assert prod % 4 == 0
    return prod // 4


def parity_ok(n: int, c: int) -> bool:
    """Whether c is a possible crossing count of a good drawing of odd K_n.

    All good drawings of K_n for odd n share the parity of their
    crossing counts; Z(n) anchors the known parity.
    """
    if n % 2 == 0 or n < 5:
        raise ValueError(f"parity argument applies to odd n >= 5, got {n}")
    return (c - zed(n)) % 2 == 0


def deficiency(dr: Drawing) -> int:
    """cr(D) - Z(n); negative values witness a drawing below the conjecture."""
    return dr.x - zed(dr.n_real)


def ndp_check(dr: Drawing) -> tuple[bool, int | None]:
    """Whether every deletion satisfies delta(D-v) <= 2*delta(D).

    Defined for even n only.  Returns (ok, witness) with the first
    violating vertex as witness; a violation implies a drawing of
    K_{n+1} below Z(n+1) exists (duplicate the witness vertex).
    """
    if dr.n_real % 2:
        raise ValueError("normal deficiency property is defined for even n")
    bound = 2 * deficiency(dr)
    zn1 = zed(dr.n_real - 1)
    for v in range(1, dr.n_real + 1):
        if (dr.x - dr.crossings_at(v)) - zn1 > bound:
            return False, v
    return True, None


def duplication_bound(dr: Drawing, v: int) -> int:
    """Lower bound on cr of the K_{n+1} obtained by duplicating v (n odd)."""
    if dr.n_real % 2 == 0:
        raise ValueError("duplication bound is stated for odd n only")
    m = (dr.n_real - 1) // 2
    return dr.x + dr.crossings_at(v) + m * (m - 1)


# ---------------------------------------------------------------------------
# Deletion profiles and the symmetric pairwise system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeletionProfile:
    """Multiset of the n vertex-deletion crossing counts of one drawing."""

    counts: tuple[tuple[int, int], ...]  # (value, multiplicity), ascending

    @property
    def size(self) -> int:
        return sum(m for _, m in self.counts)

    @property
    def weighted_sum(self) -> int:
        return sum(v * m for v, m in self.counts)

    def multiplicity(self, value: int) -> int:
        return dict(self.counts).get(value, 0)

    def values(self) -> list[int]:
        return [v for v, m in self.counts for _ in range(m)]


def _partitions(total: int, max_parts: int, cap: int):
    """Partitions of total into at most max_parts parts, descending tuples."""
    if total == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(total, cap), 0, -1):
        for rest in _partitions(total - first, max_parts - 1, first):
            yield (first,) + rest


def deletion_profiles(n: int, c: int, floor_cr: int) -> list[DeletionProfile]:
    """All multisets of n deletion counts >= floor_cr summing to (n-4)*c."""
    excess = (n - 4) * c - n * floor_cr
    if excess < 0:
        return []
    out = []
    for part in _partitions(excess, n, excess if excess else 1):
        counts: dict[int, int] = {floor_cr: n - len(part)}
        for p in part:
            counts[floor_cr + p] = counts.get(floor_cr + p, 0) + 1
        if counts.get(floor_cr) == 0:
            del counts[floor_cr]
        out.append(DeletionProfile(tuple(sorted(counts.items()))))
    out.sort(key=lambda p: p.counts[-1][0])
    return out


def pairwise_solver(n: int, c: int, high_vertices: int, low_value: int) -> int:
    """The common double-deletion count cr(D-v_i-v_j) over the high vertices.

    Setup: a drawing D of K_n with c crossings whose deletion profile has
    ``high_vertices`` equal high entries, all remaining single deletions
    being optimal so that every double deletion involving a low vertex
    equals ``low_value``.  Solves the symmetric system

        (n-5) * cr(D-v_i) = sum_{j != i} cr(D-v_i-v_j) + (n-k) * low_value

    and returns cr(D-v_i-v_j).  Raises InconsistentSystem when no exact
    integer solution exists.
    """
    k = high_vertices
    if k < 2:
        raise ValueError("need at least 2 high vertices")
    if n - 5 <= 0:
        raise InconsistentSystem(f"no pairwise equation for n={n}")
    num = (n - 1) * low_value
    if num % (n - 5):
        raise InconsistentSystem(
            f"optimal single deletion (n-1)*{low_value}/(n-5) is not integral")
    low_single = num // (n - 5)
    num = (n - 4) * c - (n - k) * low_single
    if num % k:
        raise InconsistentSystem(
            f"high single deletions ({num}/{k}) are not integral")
    high_single = num // k
    num = (n - 5) * high_single - (n - k) * low_value
    if num % (k - 1) or num < 0:
        raise InconsistentSystem(
            f"pairwise value ({num}/{k - 1}) is not a nonnegative integer")
    return num // (k - 1)


# ---------------------------------------------------------------------------
# Stage plans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stage:
    n: int
    min_crossings: int
    max_crossings: int

    @property
    def name(self) -> str:
        if self.min_crossings == self.max_crossings:
            return f"D_{self.n}^{self.max_crossings}"
        return f"D_{self.n}^<={self.max_crossings}"


@dataclass(frozen=True)
class StagePlan:
    target_n: int
    target_c: int
    use_parity: bool
    stages: tuple[Stage, ...]  # ascending n, seed first
    sub_threshold: int | None = None  # forced double-deletion value, if pinned

    def stage_for(self, n: int) -> Stage:
        for st in self.stages:
            if st.n == n:
                return st
        raise KeyError(f"no stage for n={n}")

    def budgets_descending(self) -> list[int]:
        return [st.max_crossings for st in reversed(self.stages)]

    def as_table(self) -> str:
        lines = [f"# stage plan: target K_{self.target_n} with {self.target_c} "
                 f"crossings, parity {'on' if self.use_parity else 'off'}"]
        if self.sub_threshold is not None:
            lines.append(f"# pinned top stage; subdrawing threshold "
                         f"{self.sub_threshold}")
        lines.append(f"{'set':<12}{'n':>4}{'min':>6}{'max':>6}")
        for st in self.stages:
            lines.append(f"{st.name:<12}{st.n:>4}{st.min_crossings:>6}"
                         f"{st.max_crossings:>6}")
        return "\n".join(lines) + "\n"


def _forced_top_budget(n: int, c: int, known: dict[int, int]) -> int | None:
    """The exact top-stage crossing count forced by profile elimination.

    Works through the deletion profiles of the target: when a second and
    a third high deletion are forced by the counting identity and the
    surviving profiles put every high deletion at floor+1, the top stage
    is pinned to exactly floor+1.
    """
    floor1 = known.get(n - 1)
    floor2 = known.get(n - 2)
    if floor1 is None or floor2 is None or n - 5 <= 0:
        return None
    profiles = deletion_profiles(n, c, floor1)
    if not profiles:
        return None
    # a single deletion above floor1 must force a partner above floor1
    if (n - 5) * (floor1 + 1) <= (n - 1) * floor2:
        return None
    forced_partner = -(-((n - 1) * floor2 + 1) // (n - 5))
    if forced_partner <= floor1:
        return None
    survivors = []
    for prof in profiles:
        highs = [v for v in prof.values() if v > floor1]
        if len(highs) == 1:
            continue  # partner argument kills it
        if len(highs) == 2 and highs[0] != highs[1]:
            continue  # two high deletions must agree, else a third appears
        survivors.append(prof)
    if not survivors:
        return None
    if all(prof.multiplicity(floor1 + 1) > 0
           and prof.counts[-1][0] == floor1 + 1 for prof in survivors):
        return floor1 + 1
    return None


def stage_plan(n_target: int, c_target: int, use_parity: bool,
               known_cr: dict[int, int] | None = KNOWN_CR) -> StagePlan:
    """Per-n budgets descending from the target via the counting identity.

    The top stage (n_target - 1) is pinned to an exact count when the
    deletion-profile analysis forces one; every lower budget is
    floor((n+1-4) * c_{n+1} / (n+1)), reduced by one on odd n whose
    parity disagrees with Z(n) (when parity is enabled).  Minimum
    crossings come from ``known_cr`` (empty dict = discovery mode).
    """
    if n_target < 5:
        raise ValueError("target must have at least 5 vertices")
    known = known_cr or {}
    stages: list[Stage] = []
    sub_threshold = None

    top = n_target - 1
    pinned = _forced_top_budget(n_target, c_target, known)
    if pinned is not None:
        budget = pinned
        lo = pinned
        high_count = (n_target - 4) * c_target - n_target * known[top]
        try:
            sub_threshold = pairwise_solver(n_target, c_target,
                                            high_count, known[top - 1])
        except InconsistentSystem:
            sub_threshold = None
    else:
        budget = (n_target - 4) * c_target // n_target
        if use_parity and top % 2 and top >= 5 and not parity_ok(top, budget):
            budget -= 1
        lo = min(known.get(top, 0), budget)
    stages.append(Stage(top, lo, budget))

    for n in range(top - 1, 3, -1):
        c_above = stages[-1].max_crossings
        budget = (n - 3) * c_above // (n + 1)
        if use_parity and n % 2 and n >= 5 and not parity_ok(n, budget):
            budget -= 1
        lo = min(known.get(n, 0), budget)
        stages.append(Stage(n, lo, budget))

    stages.reverse()
    return StagePlan(n_target, c_target, use_parity, tuple(stages),
                     sub_threshold)
