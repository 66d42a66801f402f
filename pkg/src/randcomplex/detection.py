"""Component analysis and occurrence detection on built complexes."""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .complexes import (
    DEFAULT_SEARCH_CAP,
    GeometricComplex,
    SearchCapExceeded,
    SimplicialComplex,
    combinatorially_equivalent,
)
from .poisson import Box


class UnionFind:
    """Union by size with path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


class OccurrenceKind(str, enum.Enum):
    ISOLATED = "ISOLATED"
    PENDANT = "PENDANT"


@dataclass
class Component:
    id: int
    vertices: tuple[int, ...]
    complex: SimplicialComplex
    lower: np.ndarray
    upper: np.ndarray
    near_boundary: bool = False


@dataclass
class ComponentDecomposition:
    components: list[Component]
    label: dict[int, int] = field(default_factory=dict)  # vertex -> component id

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i) -> Component:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def partition(self) -> list[tuple[int, ...]]:
        return [c.vertices for c in self.components]


@dataclass
class OccurrenceReport:
    kind: OccurrenceKind
    component: int
    vertices: tuple[int, ...]
    witness: dict | None
    bridge: tuple[int, int] | None = None  # (host-side vertex, pendant-side vertex)
    interior_certified: bool = False
    undecided: bool = False

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "component": self.component,
            "vertices": list(self.vertices),
            "witness": None if self.witness is None
            else {str(k): int(v) for k, v in sorted(self.witness.items())},
            "bridge": None if self.bridge is None else list(self.bridge),
            "interior_certified": self.interior_certified,
            "undecided": self.undecided,
        }


def connected_components(G: GeometricComplex, window: Box | None = None) -> ComponentDecomposition:
    """Split the complex along its 1-skeleton.

    Components are numbered by their smallest vertex label.  With a
    ``window``, each component records whether a vertex lies within ``rho``
    of the window boundary.
    """
    K = G.complex
    n = len(K.vertices)
    if n == 0:
        return ComponentDecomposition([])
    index = {v: i for i, v in enumerate(K.vertices)}
    uf = UnionFind(n)
    by_size = defaultdict(list)
    for f in K.faces:
        by_size[len(f)].append(f)
    for a, b in by_size[2]:
        uf.union(index[a], index[b])
    groups: dict[int, list[int]] = defaultdict(list)
    for v in K.vertices:
        groups[uf.find(index[v])].append(v)
    ordered = sorted(groups.values(), key=lambda vs: vs[0])
    label = {}
    for cid, vs in enumerate(ordered):
        for v in vs:
            label[v] = cid
    face_groups: list[list] = [[] for _ in ordered]
    for f in K.faces:
        face_groups[label[f[0]]].append(f)
    coords = G.points.coords
    comps = []
    for cid, vs in enumerate(ordered):
        sub = SimplicialComplex(tuple(vs), frozenset(face_groups[cid]), K.dim_cap, K.truncated)
        pts = coords[list(vs)]
        near = False
        if window is not None:
            near = bool(np.any(window.boundary_distance(pts) < G.rho))
        comps.append(Component(cid, tuple(vs), sub, pts.min(axis=0), pts.max(axis=0), near))
    return ComponentDecomposition(comps, label)


def _require_cap(G: GeometricComplex, target: SimplicialComplex):
    need = max(1, target.dimension + 1)
    if G.complex.dim_cap < need and G.complex.truncated:
        raise ValueError(
            f"complex stored up to dimension {G.complex.dim_cap}; "
            f"matching a {target.dimension}-dimensional target needs {need}"
        )


def _match(sub: SimplicialComplex, target: SimplicialComplex, search_cap: int):
    """(matched, witness, undecided) for one candidate subcomplex."""
    try:
        ok, witness = combinatorially_equivalent(sub, target, search_cap=search_cap)
    except SearchCapExceeded:
        return False, None, True
    return ok, witness, False


def find_isolated_occurrences(G: GeometricComplex, target: SimplicialComplex, window: Box,
                              rho: float | None = None,
                              search_cap: int = DEFAULT_SEARCH_CAP) -> list[OccurrenceReport]:
    """Components equivalent to ``target`` lying at least ``rho`` inside ``window``.

    No point outside the closed window can be within ``rho`` of such a
    component, so it is isolated in any extension of the sample.  Components
    the isomorphism search cannot decide are reported with ``undecided``.
    """
    rho = G.rho if rho is None else rho
    _require_cap(G, target)
    n_target = len(target.vertices)
    reports = []
    for comp in connected_components(G, window):
        if len(comp.vertices) != n_target:
            continue
        pts = G.points.coords[list(comp.vertices)]
        if np.any(window.boundary_distance(pts) < rho) or not np.all(window.contains(pts)):
            continue
        ok, witness, undecided = _match(comp.complex, target, search_cap)
        if ok or undecided:
            reports.append(OccurrenceReport(OccurrenceKind.ISOLATED, comp.id, comp.vertices,
                                            witness, None, True, undecided))
    return reports


def bridges(vertices, edges) -> list[tuple[int, int]]:
    """Cut edges of a graph, as (parent, child) pairs of a DFS from the smallest label."""
    adj: dict[int, list[int]] = {v: [] for v in vertices}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    for v in adj:
        adj[v].sort()
    tin: dict[int, int] = {}
    low: dict[int, int] = {}
    out = []
    timer = 0
    for root in sorted(adj):
        if root in tin:
            continue
        tin[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            v, parent, it = stack[-1]
            w = next(it, None)
            if w is None:
                stack.pop()
                if parent >= 0:
                    low[parent] = min(low[parent], low[v])
                    if low[v] > tin[parent]:
                        out.append((parent, v))
                continue
            if w == parent:
                continue
            if w in tin:
                low[v] = min(low[v], tin[w])
            else:
                tin[w] = low[w] = timer
                timer += 1
                stack.append((w, v, iter(adj[w])))
    return sorted(out)


def _side(adj: dict[int, list[int]], start: int, blocked: tuple[int, int],
          limit: int) -> set[int] | None:
    """Vertices reachable from ``start`` without the blocked edge; None past ``limit``."""
    seen = {start}
    stack = [start]
    a, b = blocked
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w in seen or (v == a and w == b) or (v == b and w == a):
                continue
            seen.add(w)
            if len(seen) > limit:
                return None
            stack.append(w)
    return seen


def find_pendant_occurrences(G: GeometricComplex, target: SimplicialComplex, host,
                             decomposition: ComponentDecomposition | None = None,
                             window: Box | None = None,
                             search_cap: int = DEFAULT_SEARCH_CAP) -> list[OccurrenceReport]:
    """Target copies hanging off the host component by a single bridge edge.

    A bridge lies in no triangle, so the pendant meets the rest of the host
    in exactly that edge.  For each bridge the smaller side (both sides on a
    tie) is compared with ``target``.
    """
    _require_cap(G, target)
    if decomposition is None:
        decomposition = connected_components(G, window)
    comp = host if isinstance(host, Component) else decomposition[int(host)]
    edges = [f for f in comp.complex.faces if len(f) == 2]
    adj: dict[int, list[int]] = {v: [] for v in comp.vertices}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    n_target = len(target.vertices)
    total = len(comp.vertices)
    reports = []
    if 2 * n_target > total:
        return []
    for parent, child in bridges(comp.vertices, edges):
        for start, bridge in ((child, (parent, child)), (parent, (child, parent))):
            side = _side(adj, start, (parent, child), n_target)
            if side is None or len(side) != n_target:
                continue
            sub = comp.complex.induced(side)
            ok, witness, undecided = _match(sub, target, search_cap)
            if not (ok or undecided):
                continue
            interior = False
            if window is not None:
                pts = G.points.coords[sorted(side)]
                interior = bool(np.all(window.boundary_distance(pts) >= G.rho))
            reports.append(OccurrenceReport(OccurrenceKind.PENDANT, comp.id, tuple(sorted(side)),
                                            witness, bridge, interior, undecided))
    return reports


def crossing_components(G: GeometricComplex, window: Box, axis: int = 0,
                        decomposition: ComponentDecomposition | None = None) -> list[int]:
    if decomposition is None:
        decomposition = connected_components(G)
    lo, hi = window.lower[axis], window.upper[axis]
    out = []
    for comp in decomposition:
        if comp.lower[axis] - lo <= G.rho and hi - comp.upper[axis] <= G.rho:
            out.append(comp.id)
    return out


def crossing_component(G: GeometricComplex, window: Box, axis: int = 0,
                       decomposition: ComponentDecomposition | None = None) -> int | None:
    """Component reaching within ``rho`` of both faces of ``window`` normal to ``axis``.

    When several cross, the one with most vertices wins (lowest id on ties).
    """
    if decomposition is None:
        decomposition = connected_components(G)
    ids = crossing_components(G, window, axis, decomposition)
    if not ids:
        return None
    return max(ids, key=lambda c: (len(decomposition[c].vertices), -c))


def giant_component(G: GeometricComplex, window: Box, axis: int = 0,
                    decomposition: ComponentDecomposition | None = None) -> tuple[int | None, bool]:
    """Crossing component, else the largest one; the flag says whether it crosses."""
    if decomposition is None:
        decomposition = connected_components(G)
    cid = crossing_component(G, window, axis, decomposition)
    if cid is not None:
        return cid, True
    if len(decomposition) == 0:
        return None, False
    return max(range(len(decomposition)),
               key=lambda c: (len(decomposition[c].vertices), -c)), False
