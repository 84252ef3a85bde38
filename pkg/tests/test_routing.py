from oracles import walk_routings

from crforge.drawing import relabel, seed_k4
from crforge.routing import distances, dual, enumerate_routings


def test_dual_counts_seed():
    dg = dual(seed_k4())
    assert dg.n_faces == 4
    assert dg.n_arcs == 6


def test_dual_counts_k5(d5):
    dg = dual(d5[0])
    assert dg.n_faces == 8
    assert dg.n_arcs == 12


def test_arcs_join_distinct_faces(small_pool):
    for d in small_pool:
        dg = dual(d)
        for f, arcs in enumerate(dg.adj):
            for _, _, g in arcs:
                assert g != f


def test_distances_seed():
    k4 = seed_k4()
    dg = dual(k4)
    for f in range(4):
        dists = [distances(k4, f, w, dual_graph=dg) for w in range(1, 5)]
        assert sorted(dists) == [0, 0, 0, 1]
        assert sum(dists) == 1  # minimal insertion cost = cr(K5)


def test_distance_zero_on_boundary(d6):
    d = d6[0]
    dg = dual(d)
    for f in range(dg.n_faces):
        for w in dg.face_vertices[f]:
            assert dg.dist_map(w)[f] == 0


def test_enumerate_matches_walk_oracle_at_length_one():
    k4 = seed_k4()
    dg = dual(k4)
    for f in range(4):
        for w in range(1, 5):
            if w in dg.face_vertices[f]:
                continue
            got = {r.crossed for r in enumerate_routings(k4, f, w, 1)}
            assert got == walk_routings(k4, f, w, 1)


def test_geodesics_only_at_tight_budget(d6):
    d = d6[0]
    dg = dual(d)
    for f in range(0, dg.n_faces, 3):
        for w in range(1, 7):
            dw = dg.dist_map(w)[f]
            rs = enumerate_routings(d, f, w, dw, dual_graph=dg)
            assert all(r.length == dw for r in rs)


def test_monotone_in_budget(d6):
    d = d6[1] if len(d6) > 1 else d6[0]
    dg = dual(d)
    for f in range(0, dg.n_faces, 4):
        for w in (1, 4, 6):
            shorter = {r.crossed for r in
                       enumerate_routings(d, f, w, 2, dual_graph=dg)}
            longer = {r.crossed for r in
                      enumerate_routings(d, f, w, 3, dual_graph=dg)}
            assert shorter <= longer


def test_count_invariant_under_relabel(d6):
    d = d6[0]
    r = relabel(d, {1: 6, 2: 5, 3: 4, 4: 3, 5: 2, 6: 1})
    def profile(dd):
        dg = dual(dd)
        counts = []
        for f in range(dg.n_faces):
            row = sorted(len(enumerate_routings(dd, f, w, dg.dist_map(w)[f] + 1,
                                                dual_graph=dg))
                         for w in range(1, 7))
            counts.append(tuple(row))
        return sorted(counts)
    assert profile(d) == profile(r)


def test_routing_soundness(d7):
    d = d7[0]
    dg = dual(d)
    for f in (0, 5, 10):
        for w in range(1, 8):
            for r in enumerate_routings(d, f, w, dg.dist_map(w)[f] + 2,
                                        dual_graph=dg):
                assert len(r.edge_set) == r.length
                assert all(w not in e for e in r.edge_set)
                assert len(set(r.face_seq)) == len(r.face_seq)
                assert r.face_seq[0] == f
                assert w in dg.face_vertices[r.face_seq[-1]]


def test_routing_dump_format(d5):
    d = d5[0]
    dg = dual(d)
    f = next(f for f in range(dg.n_faces) if dg.dist_map(1)[f] == 1)
    r = enumerate_routings(d, f, 1, 1, dual_graph=dg)[0]
    assert r.dump().startswith(f"R F={f} w=1 len=1: ")


def test_walk_oracle_equivalence_small(small_pool):
    # distinct-faces enumeration is complete for slack up to 3 on n <= 6
    for d in small_pool[:6]:
        dg = dual(d)
        for f in range(0, dg.n_faces, 2):
            for w in range(1, d.n_real + 1):
                base = dg.dist_map(w)[f]
                got = {r.crossed for r in
                       enumerate_routings(d, f, w, base + 3, dual_graph=dg)}
                assert got == walk_routings(d, f, w, base + 3)
