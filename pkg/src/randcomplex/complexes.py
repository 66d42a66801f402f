"""Abstract simplicial complexes, Vietoris-Rips and Čech builders, isomorphism."""
from __future__ import annotations

import enum
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np
from scipy.spatial import cKDTree

from .geometry import PointSet, as_pointset, leq, meb_radius, tol

logger = logging.getLogger(__name__)

MAX_RIPS_DIM = 8
DEFAULT_SEARCH_CAP = 32

Face = tuple[int, ...]


class Flavor(str, enum.Enum):
    RIPS = "RIPS"
    CECH = "CECH"


class SearchCapExceeded(RuntimeError):
    """Raised instead of answering when an isomorphism search is too large."""


@dataclass(frozen=True)
class SimplicialComplex:
    """Downward-closed face set on integer vertices, stored up to ``dim_cap``.

    ``truncated`` records that faces above ``dim_cap`` may exist but were not
    stored (builders set it when a clique/face could still be extended).
    """

    vertices: tuple[int, ...]
    faces: frozenset
    dim_cap: int
    truncated: bool = False

    @classmethod
    def from_faces(cls, faces: Iterable[Iterable[int]], dim_cap: int | None = None,
                   vertices: Iterable[int] = (), truncated: bool = False) -> "SimplicialComplex":
        """Build the downward closure of ``faces`` (and isolated ``vertices``)."""
        tops = [tuple(sorted(set(f))) for f in faces]
        tops = [f for f in tops if f]
        verts = set(vertices)
        for f in tops:
            verts.update(f)
        if dim_cap is None:
            dim_cap = max([len(f) - 1 for f in tops] + [0])
        closed = set((v,) for v in verts)
        for f in tops:
            for k in range(2, min(len(f), dim_cap + 1) + 1):
                closed.update(combinations(f, k))
        return cls(tuple(sorted(verts)), frozenset(closed), dim_cap, truncated)

    @property
    def dimension(self) -> int:
        if not self.faces:
            return -1
        return max(len(f) for f in self.faces) - 1

    def faces_of_dim(self, k: int) -> list[Face]:
        return sorted(f for f in self.faces if len(f) == k + 1)

    def f_vector(self) -> list[int]:
        counts = Counter(len(f) for f in self.faces)
        return [counts.get(k + 1, 0) for k in range(self.dimension + 1)]

    def edges(self) -> list[Face]:
        return self.faces_of_dim(1)

    def maximal_faces(self) -> list[Face]:
        faces = sorted(self.faces, key=lambda f: (-len(f), f))
        maximal: list[Face] = []
        covered: set[Face] = set()
        for f in faces:
            if f in covered:
                continue
            maximal.append(f)
            for k in range(1, len(f)):
                covered.update(combinations(f, k))
        return sorted(maximal)

    def __contains__(self, face) -> bool:
        return tuple(sorted(face)) in self.faces

    def __len__(self) -> int:
        return len(self.faces)

    def validate(self):
        vs = set(self.vertices)
        for f in self.faces:
            if list(f) != sorted(set(f)):
                raise ValueError(f"face {f} is not a sorted vertex tuple")
            if not set(f) <= vs:
                raise ValueError(f"face {f} uses unknown vertices")
            if len(f) > self.dim_cap + 1:
                raise ValueError(f"face {f} exceeds dim_cap {self.dim_cap}")
            for k in range(1, len(f)):
                for sub in combinations(f, k):
                    if sub not in self.faces:
                        raise ValueError(f"subface {sub} of {f} missing")
        for v in vs:
            if (v,) not in self.faces:
                raise ValueError(f"vertex {v} has no 0-face")

    def induced(self, vertices: Iterable[int]) -> "SimplicialComplex":
        vs = set(vertices)
        faces = frozenset(f for f in self.faces if vs.issuperset(f))
        return SimplicialComplex(tuple(sorted(vs)), faces, self.dim_cap, self.truncated)

    def relabeled(self, mapping) -> "SimplicialComplex":
        faces = frozenset(tuple(sorted(mapping[v] for v in f)) for f in self.faces)
        return SimplicialComplex(tuple(sorted(mapping[v] for v in self.vertices)),
                                 faces, self.dim_cap, self.truncated)

    def to_json(self) -> dict:
        out = {
            "dim_cap": self.dim_cap,
            "vertices": list(self.vertices),
            "maximal_faces": [list(f) for f in self.maximal_faces()],
        }
        if self.truncated:
            out["truncated"] = True
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SimplicialComplex":
        K = cls.from_faces(obj["maximal_faces"], dim_cap=int(obj["dim_cap"]),
                           vertices=obj.get("vertices", ()),
                           truncated=bool(obj.get("truncated", False)))
        stray = [f for f in obj["maximal_faces"] if len(f) > K.dim_cap + 1]
        if stray:
            raise ValueError(f"faces {stray} exceed dim_cap {K.dim_cap}")
        K.validate()
        return K


@dataclass(frozen=True)
class GeometricComplex:
    complex: SimplicialComplex
    points: PointSet
    rho: float
    flavor: Flavor

    @property
    def coordinates(self) -> PointSet:
        return self.points


def skeleton(K: SimplicialComplex, k: int) -> SimplicialComplex:
    if k < 0:
        raise ValueError("skeleton degree must be >= 0")
    if K.truncated and k >= K.dim_cap:
        return K
    faces = frozenset(f for f in K.faces if len(f) <= k + 1)
    return SimplicialComplex(K.vertices, faces, k, False)


def disjoint_union(K: SimplicialComplex, L: SimplicialComplex) -> SimplicialComplex:
    shift = (max(K.vertices) + 1 if K.vertices else 0) - (min(L.vertices) if L.vertices else 0)
    Ls = L.relabeled({v: v + shift for v in L.vertices})
    return SimplicialComplex(K.vertices + Ls.vertices, K.faces | Ls.faces,
                             max(K.dim_cap, L.dim_cap), K.truncated or L.truncated)


def wedge_sum(K: SimplicialComplex, k_base: int, L: SimplicialComplex, l_base: int) -> SimplicialComplex:
    """One-point union of ``K`` and ``L`` with the two basepoints identified.

    ``K`` keeps its labels; the other vertices of ``L`` get fresh labels above
    ``max(K.vertices)`` in increasing order.
    """
    if k_base not in K.vertices:
        raise ValueError(f"basepoint {k_base} is not a vertex of K")
    if l_base not in L.vertices:
        raise ValueError(f"basepoint {l_base} is not a vertex of L")
    nxt = max(K.vertices) + 1
    mapping = {l_base: k_base}
    for v in L.vertices:
        if v != l_base:
            mapping[v] = nxt
            nxt += 1
    Lr = L.relabeled(mapping)
    verts = tuple(sorted(set(K.vertices) | set(Lr.vertices)))
    return SimplicialComplex(verts, K.faces | Lr.faces, max(K.dim_cap, L.dim_cap),
                             K.truncated or L.truncated)


# -- builders ---------------------------------------------------------------


def _neighbor_sets(X: PointSet, rho: float) -> list[set[int]]:
    n = len(X)
    nbrs: list[set[int]] = [set() for _ in range(n)]
    if n < 2:
        return nbrs
    limit = rho + tol(rho)
    tree = cKDTree(X.coords)
    pairs = tree.query_pairs(limit * (1 + 1e-12), output_type="ndarray")
    if len(pairs):
        diffs = X.coords[pairs[:, 0]] - X.coords[pairs[:, 1]]
        dists = np.sqrt(np.einsum("ij,ij->i", diffs, diffs))
        for (i, j), dij in zip(pairs.tolist(), dists):
            if dij <= limit:
                nbrs[i].add(j)
                nbrs[j].add(i)
    return nbrs


def _expand(X: PointSet, nbrs: list[set[int]], max_size: int, accept) -> tuple[set[Face], bool]:
    """Enumerate accepted cliques up to ``max_size`` vertices.

    Cliques grow by increasing label; a rejected clique is not extended,
    which is valid because both face tests are monotone under inclusion.
    """
    faces: set[Face] = set()
    truncated = False
    stack: list[tuple[Face, set[int]]] = []
    for v in range(len(X)):
        faces.add((v,))
        stack.append(((v,), {u for u in nbrs[v] if u > v}))
    while stack:
        face, cands = stack.pop()
        for u in sorted(cands):
            new = face + (u,)
            if len(new) > 2 and not accept(new):
                continue
            if len(new) > max_size:
                truncated = True
                break
            faces.add(new)
            rest = {w for w in cands if w > u} & nbrs[u]
            if rest:
                stack.append((new, rest))
    return faces, truncated


def _resolve_cap(n: int, dim_cap: int | None, default: int, hard_max: int | None = None) -> int:
    cap = default if dim_cap is None else int(dim_cap)
    if cap < 1:
        raise ValueError("dim_cap must be >= 1")
    if hard_max is not None and cap > hard_max:
        logger.warning("dim_cap %d clamped to %d", cap, hard_max)
        cap = hard_max
    return cap


def _check_rho(rho: float):
    if not rho > 0:
        raise ValueError("rho must be positive")


def rips_complex(X, rho: float, dim_cap: int | None = None) -> GeometricComplex:
    X = as_pointset(X)
    _check_rho(rho)
    cap = _resolve_cap(len(X), dim_cap, max(1, min(len(X) - 1, MAX_RIPS_DIM)), MAX_RIPS_DIM)
    nbrs = _neighbor_sets(X, rho)
    faces, truncated = _expand(X, nbrs, cap + 1, lambda f: True)
    K = SimplicialComplex(tuple(range(len(X))), frozenset(faces), cap, truncated)
    return GeometricComplex(K, X, float(rho), Flavor.RIPS)


def cech_face_test(X: PointSet, face: Face, rho: float) -> bool:
    tau = rho / 2
    if len(face) <= 2:
        if len(face) < 2:
            return True
        i, j = face
        return leq(float(np.linalg.norm(X.coords[i] - X.coords[j])), rho)
    return leq(meb_radius(X.coords[list(face)]), tau)


def cech_complex(X, rho: float, dim_cap: int | None = None) -> GeometricComplex:
    """Čech complex: faces are sets whose minimal enclosing ball has radius <= rho/2.

    Edges come from the shared proximity graph, so the 1-skeleton is exactly
    that of :func:`rips_complex`; larger candidates are Rips cliques filtered
    by the enclosing-ball test.
    """
    X = as_pointset(X)
    _check_rho(rho)
    cap = _resolve_cap(len(X), dim_cap, max(1, min(len(X) - 1, X.dim + 1)))
    nbrs = _neighbor_sets(X, rho)
    faces, truncated = _expand(X, nbrs, cap + 1, lambda f: cech_face_test(X, f, rho))
    K = SimplicialComplex(tuple(range(len(X))), frozenset(faces), cap, truncated)
    return GeometricComplex(K, X, float(rho), Flavor.CECH)


def build_complex(X, rho: float, flavor: Flavor | str, dim_cap: int | None = None) -> GeometricComplex:
    flavor = Flavor(flavor)
    if flavor is Flavor.RIPS:
        return rips_complex(X, rho, dim_cap)
    return cech_complex(X, rho, dim_cap)


# -- combinatorial equivalence ----------------------------------------------


def _comparison_cap(K: SimplicialComplex, L: SimplicialComplex) -> int | None:
    """Highest dimension both complexes know completely; None if both are complete."""
    caps = [C.dim_cap for C in (K, L) if C.truncated]
    return min(caps) if caps else None


def _comparable_faces(K: SimplicialComplex, cap: int | None) -> frozenset:
    if cap is None or all(len(f) <= cap + 1 for f in K.faces):
        return K.faces
    return frozenset(f for f in K.faces if len(f) <= cap + 1)


def _vertex_invariants(vertices, faces) -> dict[int, tuple]:
    per_vertex: dict[int, Counter] = {v: Counter() for v in vertices}
    adj: dict[int, set[int]] = {v: set() for v in vertices}
    for f in faces:
        for v in f:
            per_vertex[v][len(f)] += 1
        if len(f) == 2:
            a, b = f
            adj[a].add(b)
            adj[b].add(a)
    base = {v: tuple(sorted(c.items())) for v, c in per_vertex.items()}
    # one refinement round: multiset of neighbor invariants
    return {v: (base[v], tuple(sorted(base[u] for u in adj[v]))) for v in vertices}


def verify_isomorphism(K: SimplicialComplex, L: SimplicialComplex, phi: dict) -> bool:
    cap = _comparison_cap(K, L)
    FK, FL = _comparable_faces(K, cap), _comparable_faces(L, cap)
    if set(phi) != set(K.vertices) or set(phi.values()) != set(L.vertices):
        return False
    if len(set(phi.values())) != len(phi):
        return False
    image = {tuple(sorted(phi[v] for v in f)) for f in FK}
    return image == set(FL)


def combinatorially_equivalent(K: SimplicialComplex, L: SimplicialComplex,
                               search_cap: int = DEFAULT_SEARCH_CAP) -> tuple[bool, dict | None]:
    """Decide whether a vertex bijection carries the faces of K onto those of L.

    When either complex is truncated, faces are compared only up to the
    smallest ``dim_cap`` among the truncated ones.
    Returns ``(True, witness)`` or ``(False, None)``; raises
    :class:`SearchCapExceeded` when the cheap invariants agree but the
    complexes have more than ``search_cap`` vertices.
    """
    cap = _comparison_cap(K, L)
    FK, FL = _comparable_faces(K, cap), _comparable_faces(L, cap)
    if len(K.vertices) != len(L.vertices) or len(FK) != len(FL):
        return False, None
    if Counter(map(len, FK)) != Counter(map(len, FL)):
        return False, None
    inv_k = _vertex_invariants(K.vertices, FK)
    inv_l = _vertex_invariants(L.vertices, FL)
    if Counter(inv_k.values()) != Counter(inv_l.values()):
        return False, None
    if len(K.vertices) > search_cap:
        raise SearchCapExceeded(
            f"{len(K.vertices)} vertices exceeds the search cap of {search_cap}"
        )
    if not K.vertices:
        return True, {}

    classes: dict[tuple, list[int]] = defaultdict(list)
    for w in L.vertices:
        classes[inv_l[w]].append(w)

    adj_k: dict[int, set[int]] = {v: set() for v in K.vertices}
    for f in FK:
        if len(f) == 2:
            adj_k[f[0]].add(f[1])
            adj_k[f[1]].add(f[0])

    # order: rarest invariant class first, then stay connected to placed vertices
    order: list[int] = []
    placed: set[int] = set()
    remaining = set(K.vertices)
    while remaining:
        frontier = [v for v in remaining if adj_k[v] & placed]
        pool = frontier or list(remaining)
        v = min(pool, key=lambda u: (len(classes[inv_k[u]]), -len(adj_k[u] & placed), u))
        order.append(v)
        placed.add(v)
        remaining.discard(v)
    pos = {v: i for i, v in enumerate(order)}

    # faces of K keyed by their last vertex in `order`
    closing: dict[int, list[Face]] = defaultdict(list)
    for f in FK:
        closing[max(f, key=pos.__getitem__)].append(f)
    faces_at_l: dict[int, list[Face]] = defaultdict(list)
    for f in FL:
        for w in f:
            faces_at_l[w].append(f)
    FLset = set(FL)

    phi: dict[int, int] = {}
    used: set[int] = set()

    def consistent(v: int, w: int) -> bool:
        for f in closing[v]:
            if tuple(sorted(phi[u] if u != v else w for u in f)) not in FLset:
                return False
        # L-faces closed by w must all come from K-faces closed by v
        n_closed = 0
        for g in faces_at_l[w]:
            if all(x == w or x in used for x in g):
                n_closed += 1
        return n_closed == len(closing[v])

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in classes[inv_k[v]]:
            if w in used or not consistent(v, w):
                continue
            phi[v] = w
            used.add(w)
            if search(i + 1):
                return True
            del phi[v]
            used.discard(w)
        return False

    if not search(0):
        return False, None
    witness = dict(phi)
    if not verify_isomorphism(K, L, witness):
        raise AssertionError("isomorphism witness failed verification")
    return True, witness
