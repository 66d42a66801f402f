"""Euclidean primitives: point sets, minimal enclosing balls, set distances."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

REL_TOL = 1e-9
ABS_TOL = 1e-12

# seed for the move-to-front shuffle; fixed so MEB results are reproducible
_MEB_SHUFFLE_SEED = 0x5EB


def tol(x: float) -> float:
    """Shared comparison slack for a quantity of magnitude ``x``."""
    return max(REL_TOL * abs(x), ABS_TOL)


def leq(a: float, b: float) -> bool:
    """``a <= b`` up to the shared tolerance."""
    return a <= b + tol(max(abs(a), abs(b)))


def close(a: float, b: float) -> bool:
    return abs(a - b) <= tol(max(abs(a), abs(b)))


class DuplicatePointError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite ordered list of points in R^d; row ``i`` is vertex label ``i``."""

    coords: np.ndarray
    allow_duplicates: bool = field(default=False)

    def __post_init__(self):
        arr = np.array(self.coords, dtype=float)
        if arr.ndim == 1:
            if arr.size != 0:
                raise ValueError("coords must be a 2-d array of shape (n, d)")
            arr = arr.reshape(0, 1)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise ValueError(f"coords must have shape (n, d) with d >= 1, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coordinates must be finite")
        if not self.allow_duplicates and len(arr) > 1:
            uniq = np.unique(arr, axis=0)
            if len(uniq) != len(arr):
                raise DuplicatePointError(
                    "duplicate points; pass allow_duplicates=True to keep them"
                )
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @classmethod
    def empty(cls, dim: int) -> "PointSet":
        return cls(np.zeros((0, dim)))

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def __len__(self) -> int:
        return self.coords.shape[0]

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.coords.shape == other.coords.shape and bool(
            np.array_equal(self.coords, other.coords)
        )

    def __hash__(self):
        return hash(self.coords.tobytes())

    def subset(self, indices) -> "PointSet":
        return PointSet(self.coords[list(indices)], allow_duplicates=self.allow_duplicates)

    def scaled(self, factor: float) -> "PointSet":
        return PointSet(self.coords * factor, allow_duplicates=self.allow_duplicates)

    def translated(self, vector) -> "PointSet":
        return PointSet(self.coords + np.asarray(vector, dtype=float),
                        allow_duplicates=self.allow_duplicates)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if len(self) == 0:
            raise ValueError("empty point set has no bounding box")
        return self.coords.min(axis=0), self.coords.max(axis=0)


def as_pointset(points, allow_duplicates: bool = False) -> PointSet:
    if isinstance(points, PointSet):
        return points
    return PointSet(np.asarray(points, dtype=float), allow_duplicates=allow_duplicates)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def contains(self, p, slack: bool = True) -> bool:
        d = float(np.linalg.norm(np.asarray(p, dtype=float) - self.center))
        return leq(d, self.radius) if slack else d <= self.radius


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(math.sqrt(float(np.sum((a - b) ** 2))))


def _ball_through(support: list[np.ndarray]) -> Ball | None:
    """Smallest ball with every support point on its boundary.

    The center is sought in the affine hull of the support; degenerate
    (affinely dependent) supports fall back to a least-squares center.
    """
    if not support:
        return None
    p0 = support[0]
    if len(support) == 1:
        return Ball(p0.copy(), 0.0)
    A = np.array([p - p0 for p in support[1:]])
    rhs = 0.5 * np.einsum("ij,ij->i", A, A)
    gram = A @ A.T
    try:
        lam = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    center = p0 + lam @ A
    radius = max(float(np.linalg.norm(p - center)) for p in support)
    return Ball(center, radius)


def _inside(ball: Ball | None, p: np.ndarray) -> bool:
    if ball is None:
        return False
    return leq(float(np.linalg.norm(p - ball.center)), ball.radius)


def _mtf(pts: list[np.ndarray], end: int, support: list[np.ndarray], dim: int) -> Ball | None:
    ball = _ball_through(support)
    if len(support) == dim + 1:
        return ball
    i = 0
    while i < end:
        p = pts[i]
        if not _inside(ball, p):
            ball = _mtf(pts, i, support + [p], dim)
            # move-to-front keeps the hard points early for later passes
            pts.insert(0, pts.pop(i))
        i += 1
    return ball


def minimal_enclosing_ball(A) -> Ball:
    """Smallest closed ball containing every point of ``A``.

    Randomized incremental construction (Welzl, move-to-front variant) with
    a fixed shuffle seed, so the result depends only on the input.
    """
    A = as_pointset(A, allow_duplicates=True)
    n = len(A)
    if n == 0:
        raise ValueError("minimal enclosing ball of an empty set")
    if n == 1:
        return Ball(A.coords[0].copy(), 0.0)
    if n == 2:
        c = 0.5 * (A.coords[0] + A.coords[1])
        return Ball(c, 0.5 * euclidean_distance(A.coords[0], A.coords[1]))
    order = np.random.default_rng(_MEB_SHUFFLE_SEED).permutation(n)
    pts = [A.coords[i].copy() for i in order]
    ball = _mtf(pts, n, [], A.dim)
    # tighten radius to the farthest input point from the final center
    radius = float(np.max(np.linalg.norm(A.coords - ball.center, axis=1)))
    return Ball(ball.center, radius)


def meb_radius(A) -> float:
    return minimal_enclosing_ball(A).radius


def _check_same_dim(X: PointSet, Y: PointSet):
    if X.dim != Y.dim:
        raise ValueError(f"dimension mismatch: {X.dim} vs {Y.dim}")


def hausdorff_distance(X, Y) -> float:
    X, Y = as_pointset(X, True), as_pointset(Y, True)
    if len(X) == 0 or len(Y) == 0:
        raise ValueError("Hausdorff distance needs nonempty sets")
    _check_same_dim(X, Y)
    D = cdist(X.coords, Y.coords)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def _has_perfect_matching(adj: np.ndarray) -> bool:
    """Kuhn's augmenting-path test on a square boolean bipartite matrix."""
    n = adj.shape[0]
    nbrs = [np.flatnonzero(adj[i]).tolist() for i in range(n)]
    match_left = [-1] * n
    match_right = [-1] * n

    for root in range(n):
        if not nbrs[root]:
            return False
        parent: dict[int, int] = {}
        stack = [iter(nbrs[root])]
        lefts = [root]
        free = -1
        while stack and free < 0:
            v = next(stack[-1], None)
            if v is None:
                stack.pop()
                lefts.pop()
                continue
            if v in parent:
                continue
            parent[v] = lefts[-1]
            if match_right[v] < 0:
                free = v
            else:
                w = match_right[v]
                stack.append(iter(nbrs[w]))
                lefts.append(w)
        if free < 0:
            return False
        v = free
        while v >= 0:
            u = parent[v]
            nxt = match_left[u]
            match_left[u] = v
            match_right[v] = u
            v = nxt
    return True


def bottleneck_set_distance(X, Y) -> float:
    """Min over bijections of the max matched-pair distance; inf if sizes differ."""
    X, Y = as_pointset(X, True), as_pointset(Y, True)
    if len(X) and len(Y):
        _check_same_dim(X, Y)
    if len(X) != len(Y):
        return math.inf
    if len(X) == 0:
        return 0.0
    D = cdist(X.coords, Y.coords)
    cand = np.unique(D)
    lo, hi = 0, len(cand) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching(D <= cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)
