import pytest

from crforge.counting import (KNOWN_CR, DeletionProfile, InconsistentSystem,
                              deficiency, deletion_profiles,
                              duplication_bound, ndp_check, pairwise_solver,
                              parity_ok, stage_plan, zed)
from crforge.drawing import crossings_at, delete_vertex, relabel


def test_zed_values():
    assert zed(4) == 0
    assert zed(12) == 150
    assert zed(13) == 225
    assert [zed(n) for n in range(5, 12)] == [1, 3, 9, 18, 36, 60, 100]


def test_zed_recurrence():
    for n in range(5, 25):
        assert n * zed(n - 1) <= (n - 4) * zed(n)


def test_zed_rejects_bad_n():
    with pytest.raises(ValueError):
        zed(0)


def test_parity():
    assert not parity_ok(9, 37)
    assert parity_ok(7, 9)
    assert parity_ok(13, 217)
    with pytest.raises(ValueError):
        parity_ok(8, 18)


def test_stage_plan_parity_on():
    plan = stage_plan(13, 217, True)
    assert plan.budgets_descending() == [151, 100, 63, 36, 20, 9, 3, 1, 0]
    assert plan.stage_for(12).min_crossings == 151
    assert plan.sub_threshold == 104


def test_stage_plan_parity_off():
    plan = stage_plan(13, 217, False)
    assert plan.stage_for(9).max_crossings == 37
    assert plan.stage_for(7).max_crossings == 10


def test_stage_plan_small_target():
    plan = stage_plan(5, 1, True)
    assert len(plan.stages) == 1
    st = plan.stages[0]
    assert (st.n, st.min_crossings, st.max_crossings) == (4, 0, 0)


def test_stage_plan_table_layout():
    table = stage_plan(13, 217, True).as_table()
    assert "D_12^151" in table
    assert "D_8^<=20" in table


def test_deficiency(d5):
    assert deficiency(d5[0]) == 0
    r = relabel(d5[0], {1: 5, 2: 4, 3: 3, 4: 2, 5: 1})
    assert deficiency(r) == 0


class _Stub:
    """Crossing bookkeeping stand-in for orders we cannot generate."""

    def __init__(self, n_real, x, cr_at=()):
        self.n_real = n_real
        self.x = x
        self._cr = dict(cr_at)

    def crossings_at(self, v):
        return self._cr.get(v, 0)


def test_deficiency_of_151_k12():
    assert deficiency(_Stub(12, 151)) == 1


def test_ndp_on_optimal_k8(d8):
    for d in d8:
        if d.x == 18:
            ok, witness = ndp_check(d)
            assert ok and witness is None
            for v in range(1, 9):
                assert (d.x - crossings_at(d, v)) - zed(7) == 0


def test_ndp_bound_arithmetic(d8):
    for d in d8:
        if d.x == 20:
            ok, _ = ndp_check(d)
            # delta(D) = 2, so any sub-K7 up to 9 + 4 crossings passes
            assert ok == all(d.x - crossings_at(d, v) <= zed(7) + 4
                             for v in range(1, 9))


def test_ndp_violation_detected():
    bad = _Stub(6, 3, {1: 0})  # a K5 deletion keeping all 3 crossings
    ok, witness = ndp_check(bad)
    assert not ok and witness == 1


def test_ndp_rejects_odd():
    with pytest.raises(ValueError):
        ndp_check(_Stub(7, 9))


def test_duplication_bound(d5):
    k5 = d5[0]
    quiet = next(v for v in range(1, 6) if crossings_at(k5, v) == 0)
    assert duplication_bound(k5, quiet) == 3
    assert duplication_bound(_Stub(11, 100, {3: 30}), 3) == 150
    with pytest.raises(ValueError):
        duplication_bound(_Stub(6, 3), 1)


def test_duplication_bound_monotone(d7):
    d = d7[0]
    vals = sorted((crossings_at(d, v), duplication_bound(d, v))
                  for v in range(1, 8))
    for (c1, b1), (c2, b2) in zip(vals, vals[1:]):
        assert (c2 - c1) == (b2 - b1)


def test_deletion_profiles_k13():
    profs = deletion_profiles(13, 217, 150)
    assert len(profs) == 3
    expect = {
        ((150, 10), (151, 3)),
        ((150, 11), (151, 1), (152, 1)),
        ((150, 12), (153, 1)),
    }
    assert {p.counts for p in profs} == expect
    for p in profs:
        assert p.size == 13
        assert p.weighted_sum == 9 * 217


def test_deletion_profiles_zero_excess():
    assert deletion_profiles(12, 150, 100) == [
        DeletionProfile(((100, 12),))]
    assert deletion_profiles(8, 18, 9) == [DeletionProfile(((9, 8),))]


def test_deletion_profiles_infeasible():
    assert deletion_profiles(8, 17, 9) == []


def test_pairwise_solver():
    assert pairwise_solver(13, 217, 3, 100) == 104
    assert pairwise_solver(13, 217, 3, 100) == 104  # symmetric in the vertices
    with pytest.raises(InconsistentSystem):
        pairwise_solver(13, 217, 2, 100)
    with pytest.raises(ValueError):
        pairwise_solver(13, 217, 1, 100)


def test_counting_identity_on_generated_sets(d5, d6, d7, d8):
    for pool, n in ((d5, 5), (d6, 6), (d7, 7), (d8, 8)):
        for d in pool:
            total = sum(delete_vertex(d, v).x for v in range(1, n + 1))
            assert total == (n - 4) * d.x


def test_known_cr_table_consistency():
    for n in range(5, 13):
        assert (n - 4) * KNOWN_CR[n] >= n * KNOWN_CR[n - 1]
    assert KNOWN_CR[11] == 100 and KNOWN_CR[12] == 150
