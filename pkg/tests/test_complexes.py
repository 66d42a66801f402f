import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randcomplex.complexes import (
    Flavor,
    SearchCapExceeded,
    SimplicialComplex,
    build_complex,
    cech_complex,
    combinatorially_equivalent,
    disjoint_union,
    rips_complex,
    skeleton,
    verify_isomorphism,
    wedge_sum,
)
from randcomplex.homology import betti_numbers

from conftest import SEVEN, brute_equivalent, brute_faces, complexes, point_sets

SEVEN_TRIANGLE = (0, 1, 2)  # (-1,2), (-2,0), (0,0)


def cycle(n, offset=0):
    return SimplicialComplex.from_faces([(offset + i, offset + (i + 1) % n) for i in range(n)])


def boundary_of_simplex(n_vertices):
    return SimplicialComplex.from_faces(itertools.combinations(range(n_vertices), n_vertices - 1))


class TestSimplicialComplex:
    def test_downward_closure(self):
        K = SimplicialComplex.from_faces([(2, 0, 1)])
        assert K.f_vector() == [3, 3, 1]
        assert (0, 1) in K and (0, 1, 2) in K

    def test_maximal_faces(self):
        K = SimplicialComplex.from_faces([(0, 1, 2), (2, 3)], vertices=[7])
        assert K.maximal_faces() == [(0, 1, 2), (2, 3), (7,)]

    def test_json_round_trip(self):
        K = SimplicialComplex.from_faces([(0, 1, 2), (2, 3)], vertices=[5])
        assert SimplicialComplex.from_json(K.to_json()) == K

    def test_json_keeps_truncation(self):
        G = rips_complex(np.eye(4), 2.0, dim_cap=1)
        assert G.complex.truncated
        assert SimplicialComplex.from_json(G.complex.to_json()).truncated

    def test_json_rejects_faces_over_cap(self):
        with pytest.raises(ValueError):
            SimplicialComplex.from_json({"dim_cap": 1, "vertices": [0, 1, 2],
                                         "maximal_faces": [[0, 1, 2]]})

    def test_induced(self):
        K = SimplicialComplex.from_faces([(0, 1, 2), (2, 3)])
        assert K.induced([1, 2, 3]).maximal_faces() == [(1, 2), (2, 3)]


class TestSkeletonAndWedge:
    def test_skeleton_of_filled_triangle(self):
        K = SimplicialComplex.from_faces([(0, 1, 2)])
        assert skeleton(K, 1) == cycle(3)

    def test_skeleton_at_dimension_is_identity(self):
        K = SimplicialComplex.from_faces([(0, 1, 2), (2, 3)])
        assert skeleton(K, K.dimension).faces == K.faces

    def test_skeleton_of_tetrahedron_is_k4(self):
        S = skeleton(SimplicialComplex.from_faces([(0, 1, 2, 3)]), 1)
        assert S.f_vector() == [4, 6]

    def test_wedge_of_two_triangles(self):
        W = wedge_sum(cycle(3), 0, cycle(3), 0)
        assert W.f_vector() == [5, 6]

    def test_wedge_with_point(self):
        K = cycle(4)
        W = wedge_sum(K, 2, SimplicialComplex.from_faces([(0,)]), 0)
        assert combinatorially_equivalent(W, K)[0]

    def test_wedge_bad_base(self):
        with pytest.raises(ValueError):
            wedge_sum(cycle(3), 9, cycle(3), 0)

    @settings(max_examples=60, deadline=None)
    @given(complexes(max_vertices=5), complexes(max_vertices=5), st.data())
    def test_wedge_betti_adds_reduced(self, K, L, data):
        kb = data.draw(st.sampled_from(K.vertices))
        lb = data.draw(st.sampled_from(L.vertices))
        bk, bl = list(betti_numbers(K)), list(betti_numbers(L))
        W = wedge_sum(K, kb, L, lb)
        bw = list(betti_numbers(W))
        n = max(len(bk), len(bl), len(bw))
        bk, bl, bw = (b + [0] * (n - len(b)) for b in (bk, bl, bw))
        want = [bk[0] + bl[0] - 1] + [a + b for a, b in zip(bk[1:], bl[1:])]
        assert bw == want

    def test_disjoint_union(self):
        U = disjoint_union(cycle(3), cycle(3))
        assert U.f_vector() == [6, 6]


class TestBuilders:
    def test_unit_square(self):
        K = rips_complex([(0, 0), (1, 0), (1, 1), (0, 1)], 1.0).complex
        assert K.f_vector() == [4, 4]

    def test_pair_beyond_range(self):
        K = rips_complex([(0, 0), (1 + 1e-6, 0)], 1.0).complex
        assert K.f_vector() == [2]

    def test_pair_at_range_closed(self):
        K = cech_complex([(0, 0), (1, 0)], 1.0).complex
        assert K.f_vector() == [2, 1]

    def test_seven_point_rips_has_triangle_cech_not(self):
        R = rips_complex(SEVEN, 2.4).complex
        C = cech_complex(SEVEN, 2.4).complex
        assert SEVEN_TRIANGLE in R and SEVEN_TRIANGLE not in C
        assert all(e in C for e in itertools.combinations(SEVEN_TRIANGLE, 2))
        assert set(R.faces) - set(C.faces) == {SEVEN_TRIANGLE}

    def test_rips_cap_clamped(self, rng):
        K = rips_complex(rng.random((12, 2)) * 0.1, 1.0, dim_cap=20).complex
        assert K.dim_cap == 8 and K.truncated

    def test_bad_rho(self):
        with pytest.raises(ValueError):
            rips_complex([(0, 0)], 0.0)

    @settings(max_examples=120, deadline=None)
    @given(point_sets(max_size=7), st.floats(0.5, 12), st.sampled_from(["RIPS", "CECH"]))
    def test_matches_all_subsets(self, X, rho, flavor):
        G = build_complex(X, rho, flavor, dim_cap=len(X))
        assert set(G.complex.faces) == brute_faces(X, rho, flavor)

    @settings(max_examples=80, deadline=None)
    @given(point_sets(max_size=10), st.floats(0.5, 12))
    def test_rips_is_flag(self, X, rho):
        K = rips_complex(X, rho, dim_cap=min(8, len(X))).complex
        edges = set(K.edges())
        for k in range(3, min(len(X), 9) + 1):
            for S in itertools.combinations(range(len(X)), k):
                clique = all(e in edges for e in itertools.combinations(S, 2))
                assert (S in K) == clique

    @settings(max_examples=80, deadline=None)
    @given(point_sets(max_size=9), st.floats(0.5, 12))
    def test_sandwich(self, X, rho):
        cap = X.shape[1] + 1
        c1 = set(cech_complex(X, rho, cap).complex.faces)
        r = set(rips_complex(X, rho, cap).complex.faces)
        c2 = set(cech_complex(X, 2 * rho, cap).complex.faces)
        assert c1 <= r <= c2
        assert {f for f in c1 if len(f) <= 2} == {f for f in r if len(f) <= 2}

    def test_deterministic(self, rng):
        X = rng.random((40, 2)) * 4
        a = build_complex(X, 1.0, "CECH").complex
        b = build_complex(X.copy(), 1.0, "CECH").complex
        assert a == b


class TestEquivalence:
    def test_relabeled(self, rng):
        K = rips_complex(rng.random((9, 2)) * 2, 1.0).complex
        perm = rng.permutation(9)
        L = K.relabeled({v: int(perm[v]) + 100 for v in K.vertices})
        ok, phi = combinatorially_equivalent(K, L)
        assert ok and verify_isomorphism(K, L, phi)

    def test_path_vs_triangle(self):
        path = SimplicialComplex.from_faces([(0, 1), (1, 2)])
        assert combinatorially_equivalent(path, cycle(3)) == (False, None)

    def test_two_four_cycles(self):
        A = cycle(4)
        B = SimplicialComplex.from_faces([(10, 12), (12, 11), (11, 13), (13, 10)])
        ok, phi = combinatorially_equivalent(A, B)
        assert ok and brute_equivalent(A, B) and verify_isomorphism(A, B, phi)

    def test_search_cap(self):
        K = cycle(40)
        with pytest.raises(SearchCapExceeded):
            combinatorially_equivalent(K, cycle(40, 100))
        ok, _ = combinatorially_equivalent(K, cycle(40, 100), search_cap=64)
        assert ok

    def test_same_graph_different_fill(self):
        filled = SimplicialComplex.from_faces([(0, 1, 2)])
        assert not combinatorially_equivalent(filled, cycle(3))[0]

    def test_cospectral_like_graphs_distinguished(self):
        # 6-cycle vs two triangles: same degree sequence, not isomorphic
        assert not combinatorially_equivalent(cycle(6), disjoint_union(cycle(3), cycle(3)))[0]

    @settings(max_examples=150, deadline=None)
    @given(complexes(max_vertices=6), complexes(max_vertices=6))
    def test_matches_brute_force(self, K, L):
        ok, phi = combinatorially_equivalent(K, L)
        assert ok == brute_equivalent(K, L)
        if ok:
            assert verify_isomorphism(K, L, phi)

    @settings(max_examples=60, deadline=None)
    @given(complexes(max_vertices=8), st.randoms(use_true_random=False))
    def test_equivalence_relation(self, K, r):
        verts = list(K.vertices)
        p1, p2 = verts[:], verts[:]
        r.shuffle(p1)
        r.shuffle(p2)
        L = K.relabeled(dict(zip(verts, p1)))
        M = L.relabeled(dict(zip(verts, p2)))
        ok_kk, _ = combinatorially_equivalent(K, K)
        ok_kl, f = combinatorially_equivalent(K, L)
        ok_lk, _ = combinatorially_equivalent(L, K)
        ok_lm, g = combinatorially_equivalent(L, M)
        assert ok_kk and ok_kl and ok_lk and ok_lm
        assert verify_isomorphism(K, M, {v: g[f[v]] for v in K.vertices})
