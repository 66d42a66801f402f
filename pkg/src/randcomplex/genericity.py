"""Representation checks, genericity margins and the rescaling construction.

For the Čech flavor every test is phrased against the ball threshold
``tau = rho / 2`` (faces have enclosing radius <= tau).  For Vietoris-Rips
the threshold is ``rho`` itself, on pairwise distances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .complexes import (
    DEFAULT_SEARCH_CAP,
    Flavor,
    SimplicialComplex,
    build_complex,
    combinatorially_equivalent,
)
from .geometry import PointSet, as_pointset, close, meb_radius

SCALE_FRACTION = 0.9


def threshold(rho: float, flavor: Flavor | str) -> float:
    return rho / 2 if Flavor(flavor) is Flavor.CECH else rho


def _pair_distances(X: PointSet) -> list[float]:
    c = X.coords
    return [float(np.linalg.norm(c[i] - c[j])) for i, j in combinations(range(len(X)), 2)]


def _cech_radii(X: PointSet, max_size: int, extend=lambda r: True):
    """Yield enclosing radii of subsets with 2..max_size points.

    Subsets grow by increasing index; a subset is extended only while
    ``extend(r)`` holds, which is sound for monotone criteria since radii
    only grow under inclusion.
    """
    n = len(X)
    c = X.coords
    stack = [((i,), 0.0) for i in range(n)]
    while stack:
        subset, _ = stack.pop()
        for j in range(subset[-1] + 1, n):
            new = subset + (j,)
            r = (float(np.linalg.norm(c[new[0]] - c[j])) / 2 if len(new) == 2
                 else meb_radius(c[list(new)]))
            yield new, r
            if len(new) < max_size and extend(r):
                stack.append((new, r))


def genericity_margin(X, rho: float, flavor: Flavor | str = Flavor.CECH,
                      exhaustive: bool = False) -> float:
    """Distance of the configuration from the nearest face-test tie.

    CECH: min over subsets ``A`` of ``|r_A - tau|`` (singletons contribute
    ``tau``); subsets are capped at ``d + 2`` points unless ``exhaustive``.
    RIPS: min over pairs of ``|dist - rho|``.  Ties within the shared
    tolerance give exactly 0.
    """
    X = as_pointset(X)
    flavor = Flavor(flavor)
    if len(X) == 0:
        raise ValueError("margin of an empty point set")
    thr = threshold(rho, flavor)
    if flavor is Flavor.RIPS:
        vals = _pair_distances(X)
        best = min((abs(d - thr) for d in vals), default=math.inf)
        if any(close(d, thr) for d in vals):
            return 0.0
        return best
    max_size = len(X) if exhaustive else min(len(X), X.dim + 2)
    best = thr
    for _, r in _cech_radii(X, max_size, extend=lambda r: r - thr < best):
        if close(r, thr):
            return 0.0
        best = min(best, abs(r - thr))
    return best


def _nonface_gap(X: PointSet, rho: float, flavor: Flavor) -> float:
    """Smallest excess ``value - threshold`` over non-faces; inf if none."""
    thr = threshold(rho, flavor)
    if flavor is Flavor.RIPS:
        gaps = [d - thr for d in _pair_distances(X) if d > thr and not close(d, thr)]
        return min(gaps, default=math.inf)
    best = math.inf
    for _, r in _cech_radii(X, min(len(X), X.dim + 2)):
        if r > thr and not close(r, thr):
            best = min(best, r - thr)
    return best


def make_generic(X, rho: float, flavor: Flavor | str = Flavor.CECH,
                 force: bool = False) -> PointSet:
    """Return a representation of the same complex with positive margin.

    A configuration with positive margin is returned unchanged.  Otherwise the
    points are scaled about the origin by ``thr / (thr + 0.9 * gap)``, with
    ``gap`` the smallest excess of a non-face over the threshold (``thr`` when
    every subset is a face).
    """
    X = as_pointset(X)
    flavor = Flavor(flavor)
    if len(X) < 2:
        return X
    if not force and genericity_margin(X, rho, flavor) > 0:
        return X
    thr = threshold(rho, flavor)
    gap = _nonface_gap(X, rho, flavor)
    if not math.isfinite(gap):
        gap = thr
    return X.scaled(thr / (thr + SCALE_FRACTION * gap))


def is_representation(X, rho: float, K: SimplicialComplex, flavor: Flavor | str = Flavor.CECH,
                      search_cap: int = DEFAULT_SEARCH_CAP) -> tuple[bool, dict | None]:
    """Is the flavor complex of ``X`` at ``rho`` combinatorially equivalent to ``K``?"""
    X = as_pointset(X)
    cap = max(1, K.dim_cap, K.dimension + 1)
    G = build_complex(X, rho, flavor, dim_cap=cap)
    return combinatorially_equivalent(G.complex, K, search_cap=search_cap)


@dataclass
class GenericityCheck:
    passed: bool
    trials: int
    counterexample: PointSet | None = None

    def __bool__(self):
        return self.passed


def perturb(X: PointSet, delta: float, rng: np.random.Generator) -> PointSet:
    """Move every point uniformly inside the open ball of radius ``delta``."""
    n, d = X.coords.shape
    direction = rng.standard_normal((n, d))
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    # random() is in [0, 1), so radii stay strictly below delta
    radii = delta * rng.random((n, 1)) ** (1.0 / d)
    return PointSet(X.coords + direction / norms * radii, allow_duplicates=True)


def _adversarial(X: PointSet, delta: float) -> list[PointSet]:
    """Radial pushes away from / towards the centroid by 0.999 delta."""
    if len(X) < 2:
        return []
    c = X.coords.mean(axis=0)
    out = []
    for sign in (1.0, -1.0):
        v = X.coords - c
        norms = np.linalg.norm(v, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        out.append(PointSet(X.coords + sign * 0.999 * delta * v / norms, allow_duplicates=True))
    return out


def verify_generic(X, rho: float, delta: float, flavor: Flavor | str = Flavor.CECH,
                   trials: int = 100, seed: int = 0, dim_cap: int | None = None) -> GenericityCheck:
    """Randomized falsification of stability under perturbations below ``delta``.

    Two deterministic radial pushes are tried first, then ``trials`` uniform
    perturbations.  ``passed=True`` is evidence only; a failure carries the
    offending point set.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    X = as_pointset(X)
    flavor = Flavor(flavor)
    base = build_complex(X, rho, flavor, dim_cap).complex
    rng = np.random.default_rng(seed)
    candidates = _adversarial(X, delta)
    for _ in range(trials):
        candidates.append(perturb(X, delta, rng))
    for Y in candidates:
        other = build_complex(Y, rho, flavor, base.dim_cap).complex
        if other.faces == base.faces:
            continue
        ok, _ = combinatorially_equivalent(base, other)
        if not ok:
            return GenericityCheck(False, trials, Y)
    return GenericityCheck(True, trials)


@dataclass
class RepresentationCertificate:
    target: SimplicialComplex
    representation: PointSet
    rho: float
    flavor: Flavor
    margin: float
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "flavor": self.flavor.value,
            "rho": self.rho,
            "margin": self.margin,
            "points": self.representation.coords.tolist(),
            "witness": {str(k): int(v) for k, v in sorted(self.witness.items())},
        }


def certify(X, rho: float, flavor: Flavor | str = Flavor.CECH,
            target: SimplicialComplex | None = None) -> RepresentationCertificate:
    """Make ``X`` generic and certify it represents ``target`` (default: its own complex)."""
    X = as_pointset(X)
    flavor = Flavor(flavor)
    if target is None:
        target = build_complex(X, rho, flavor).complex
    Y = make_generic(X, rho, flavor)
    ok, witness = is_representation(Y, rho, target, flavor)
    if not ok:
        raise ValueError("point set does not represent the target complex")
    return RepresentationCertificate(target, Y, float(rho), flavor,
                                     genericity_margin(Y, rho, flavor), witness)
