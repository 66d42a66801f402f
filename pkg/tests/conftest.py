"""Shared fixtures, strategies and brute-force reference implementations."""
from __future__ import annotations

import math
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import strategies as st

from randcomplex.complexes import SimplicialComplex

SEVEN = [(-1, 2), (-2, 0), (0, 0), (2, 3), (0, 3), (1.2, 2.2), (1.5, 1.5)]


# -- strategies -------------------------------------------------------------

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False).map(lambda x: round(x, 3))


@st.composite
def point_sets(draw, min_size=1, max_size=8, dims=(2, 3)):
    d = draw(st.sampled_from(dims))
    n = draw(st.integers(min_size, max_size))
    rows = draw(st.lists(st.tuples(*[coord] * d), min_size=n, max_size=n, unique=True))
    return np.array(rows, dtype=float).reshape(-1, d)


@st.composite
def complexes(draw, max_vertices=7, max_faces=6):
    n = draw(st.integers(1, max_vertices))
    faces = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=1, max_size=min(n, 4)),
                          max_size=max_faces))
    return SimplicialComplex.from_faces([tuple(f) for f in faces], vertices=range(n))


# -- brute-force references -------------------------------------------------


def ball_through(P: np.ndarray):
    """Smallest ball with all of ``P`` on its boundary (center in their affine hull)."""
    p0 = P[0]
    A = P[1:] - p0
    G = A @ A.T
    rhs = 0.5 * np.einsum("ij,ij->i", A, A)
    try:
        lam = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError:
        return None
    c = p0 + lam @ A
    return c, float(np.linalg.norm(P[0] - c))


def brute_meb_radius(P) -> float:
    """Minimum over all candidate boundary sets of size <= d+1 of a ball covering P."""
    P = np.asarray(P, dtype=float)
    if len(P) == 1:
        return 0.0
    d = P.shape[1]
    best = math.inf
    for k in range(2, min(len(P), d + 1) + 1):
        for S in combinations(range(len(P)), k):
            res = ball_through(P[list(S)])
            if res is None:
                continue
            c, r = res
            if np.all(np.linalg.norm(P - c, axis=1) <= r * (1 + 1e-9) + 1e-12):
                best = min(best, r)
    return best


def brute_faces(X, rho, flavor, max_size=None):
    """Every subset passing the face test, by enumeration."""
    X = np.asarray(X, dtype=float)
    n = len(X)
    max_size = n if max_size is None else max_size
    tol = 1e-9 * rho
    out = set()
    for k in range(1, max_size + 1):
        for S in combinations(range(n), k):
            P = X[list(S)]
            if k == 1:
                ok = True
            elif flavor == "RIPS" or k == 2:
                ok = all(np.linalg.norm(P[i] - P[j]) <= rho + tol
                         for i, j in combinations(range(k), 2))
            else:
                ok = brute_meb_radius(P) <= rho / 2 + tol
            if ok:
                out.add(S)
    return out


def brute_bottleneck(A, B) -> float:
    A, B = np.asarray(A, float), np.asarray(B, float)
    if len(A) != len(B):
        return math.inf
    if len(A) == 0:
        return 0.0
    return min(max(np.linalg.norm(A[i] - B[p[i]]) for i in range(len(A)))
               for p in permutations(range(len(B))))


def brute_equivalent(K: SimplicialComplex, L: SimplicialComplex) -> bool:
    if len(K.vertices) != len(L.vertices) or len(K.faces) != len(L.faces):
        return False
    for p in permutations(L.vertices):
        phi = dict(zip(K.vertices, p))
        if {tuple(sorted(phi[v] for v in f)) for f in K.faces} == set(L.faces):
            return True
    return False


def float_betti(K: SimplicialComplex):
    """Betti numbers over R via floating-point SVD rank, for small complexes."""
    top = K.dimension
    ranks = {}
    for k in range(1, top + 2):
        rows, cols = K.faces_of_dim(k - 1), K.faces_of_dim(k)
        if not rows or not cols:
            ranks[k] = 0
            continue
        idx = {f: i for i, f in enumerate(rows)}
        M = np.zeros((len(rows), len(cols)))
        for j, f in enumerate(cols):
            for i in range(len(f)):
                M[idx[f[:i] + f[i + 1:]], j] = (-1) ** i
        ranks[k] = int(np.linalg.matrix_rank(M))
    ranks[0] = 0
    return tuple(len(K.faces_of_dim(k)) - ranks[k] - ranks.get(k + 1, 0) for k in range(top + 1))


@pytest.fixture
def seven():
    return np.array(SEVEN, dtype=float)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance PASS/FAIL lines, one per criterion."""
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
    from pathlib import Path

    (Path(__file__).parent.parent / "acceptance_results.txt").write_text("\n".join(lines) + "\n")
