from crforge import canonical
from crforge.drawing import validate
from crforge.equivalence import (EquivalenceClass, ErrorSet,
                                 iter_representative_extensions,
                                 partition_classes, select_representative)
from crforge.extension import iter_extensions
from crforge.routing import DualGraph, enumerate_routings


def _routing_pool(d, face, w, slack=2):
    dg = DualGraph(d)
    return enumerate_routings(d, face, w, dg.dist_map(w)[face] + slack,
                              dual_graph=dg)


def test_partition_keys(d6):
    d = d6[0]
    dg = DualGraph(d)
    f = max(range(len(d.face_cycles())),
            key=lambda f: len(_routing_pool(d, f, 1)))
    pool = _routing_pool(d, f, 1)
    classes = partition_classes(pool)
    assert sum(len(c.members) for c in classes) == len(pool)
    assert len(classes) <= len(pool)
    for c in classes:
        for r in c.members:
            assert tuple(sorted(r.edge_set)) == c.key
    keys = [c.key for c in classes]
    assert keys == sorted(keys)
    # equality with the routing count iff all keys distinct
    distinct = len({tuple(sorted(r.edge_set)) for r in pool})
    assert (len(classes) == len(pool)) == (distinct == len(pool))


def test_same_key_merges(d6):
    d = d6[0]
    for f in range(len(d.face_cycles())):
        pool = _routing_pool(d, f, 2, slack=3)
        classes = partition_classes(pool)
        if any(len(c.members) > 1 for c in classes):
            return  # two routings through different faces, same class
    raise AssertionError("expected a class with several members")


def test_select_representative(d6):
    d = d6[0]
    f = 0
    pool = _routing_pool(d, f, 2, slack=3)
    classes = partition_classes(pool)
    cls = max(classes, key=lambda c: len(c.members))
    assert select_representative(cls, None) is cls.members[0]
    # a face visited by only one member forces that member
    if len(cls.members) > 1:
        only = {}
        for r in cls.members:
            for g in r.face_seq:
                only.setdefault(g, []).append(r)
        for g, rs in only.items():
            if len(rs) == 1:
                assert select_representative(cls, g) is rs[0]
                break


def test_single_member_class():
    cls = EquivalenceClass(((1, 2),), ("sentinel",))
    assert cls.representative == "sentinel"


def test_error_set_format():
    errs = ErrorSet()
    errs.add("abcd", 3, (((1, 2), (3, 4)), ()))
    assert errs.to_text() == "E base=abcd face=3 classes=1-2,3-4;none\n"
    assert len(errs) == 1


def test_representative_coverage_k7_to_k8(d7):
    # every product signature from the exhaustive run appears among the
    # class products, on the same faces
    for base in d7:
        faces = canonical.face_orbits(base)
        sigs = set()
        for ext in iter_extensions(base, 20, faces=faces):
            sigs.add((ext.candidate.face,
                      tuple(tuple(sorted(r.edge_set))
                            for r in ext.candidate.routings)))
        errors = ErrorSet()
        products = set()
        for rep in iter_representative_extensions(base, 20, faces=faces,
                                                  errors=errors):
            products.add((rep.face, tuple(cls.key for cls in rep.classes)))
        assert sigs <= products
        assert len(products) <= len(sigs) + len(errors)
        # an error record means no member combination realizes, so the
        # exhaustive run must have produced nothing with that signature
        for rec in errors.records:
            assert (rec.face, rec.class_keys) not in sigs


def test_representatives_realize_fewer(d7):
    base = d7[0]
    faces = canonical.face_orbits(base)
    alg1 = list(iter_extensions(base, 19, faces=faces))
    errors = ErrorSet()
    alg2 = list(iter_representative_extensions(base, 19, faces=faces,
                                               errors=errors))
    assert len(alg2) <= len(alg1)
    assert not errors
    # every exhaustive output is equivalent (same crossed-edge sets per
    # new edge) to a realized class-product output on the same face
    sig1 = {(e.candidate.face, tuple(tuple(sorted(r.edge_set))
                                     for r in e.candidate.routings))
            for e in alg1}
    sig2 = {(r.face, tuple(c.key for c in r.classes)) for r in alg2}
    assert sig1 == sig2
    for r in alg2:
        assert validate(r.drawing).ok


def test_representative_extension_carries_context(d6):
    base = d6[0]
    for rep in iter_representative_extensions(base, 9):
        assert rep.candidate.face == rep.face
        assert len(rep.classes) == 6
        for i, cls in enumerate(rep.classes):
            assert rep.candidate.routings[i] in cls.members
        break
