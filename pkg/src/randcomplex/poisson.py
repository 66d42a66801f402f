"""Stationary Poisson point processes on axis-aligned boxes.

Two samplers produce the same law:

* ``DIRECT`` draws the total count from Poisson(t * vol) and places the
  points uniformly;
* ``CUBE`` tiles the window with unit cubes anchored at its lower corner,
  fills every cube independently and discards points outside the window.

Every cube draws from its own stream keyed by ``(seed, cube index)``, so
the output does not depend on the order in which cubes are visited.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .geometry import PointSet


class SamplingMode(str, enum.Enum):
    DIRECT = "DIRECT"
    CUBE = "CUBE"


@dataclass(frozen=True)
class Box:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(a) for a in self.lower)
        hi = tuple(float(b) for b in self.upper)
        if len(lo) != len(hi) or not lo:
            raise ValueError("box needs matching, nonempty bounds")
        if any(not (a < b) for a, b in zip(lo, hi)):
            raise ValueError(f"degenerate box {list(zip(lo, hi))}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def from_intervals(cls, intervals) -> "Box":
        intervals = [tuple(iv) for iv in intervals]
        return cls(tuple(a for a, _ in intervals), tuple(b for _, b in intervals))

    @classmethod
    def cube(cls, side: float, dim: int, origin: float = 0.0) -> "Box":
        return cls((origin,) * dim, (origin + side,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def widths(self) -> np.ndarray:
        return np.subtract(self.upper, self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    def intervals(self) -> list[list[float]]:
        return [[a, b] for a, b in zip(self.lower, self.upper)]

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=1)

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        """Distance from each (inside) point to the box boundary."""
        pts = np.atleast_2d(pts)
        return np.minimum(pts - self.lower, np.subtract(self.upper, pts)).min(axis=1)

    def eroded(self, r: float) -> "Box | None":
        lo = np.add(self.lower, r)
        hi = np.subtract(self.upper, r)
        if np.any(lo >= hi):
            return None
        return Box(tuple(lo), tuple(hi))

    def eroded_volume(self, r: float) -> float:
        return float(np.prod(np.clip(self.widths - 2 * r, 0.0, None)))


@dataclass(frozen=True)
class PoissonConfig:
    intensity: float
    window: Box
    seed: int = 0
    mode: SamplingMode = SamplingMode.DIRECT

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError("intensity must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "mode", SamplingMode(self.mode))
        object.__setattr__(self, "seed", int(self.seed))


def derive_seed(seed: int, *key: int) -> int:
    """Deterministic 64-bit child seed for ``key`` under ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))))


def sample_direct(cfg: PoissonConfig) -> PointSet:
    rng = _rng(cfg.seed)
    box = cfg.window
    n = rng.poisson(cfg.intensity * box.volume)
    pts = np.asarray(box.lower) + rng.random((n, box.dim)) * box.widths
    return PointSet(pts, allow_duplicates=True)


def sample_cube_construction(cfg: PoissonConfig) -> PointSet:
    box = cfg.window
    lower = np.asarray(box.lower)
    n_cubes = [math.ceil(w) for w in box.widths]
    chunks = []
    # lexicographic cube order fixes the output order; contents depend only on (seed, v)
    for v in itertools.product(*(range(k) for k in n_cubes)):
        rng = _rng(cfg.seed, 1, *v)
        count = rng.poisson(cfg.intensity)
        if count:
            chunks.append(lower + np.asarray(v, dtype=float) + rng.random((count, box.dim)))
    if not chunks:
        return PointSet(np.zeros((0, box.dim)), allow_duplicates=True)
    pts = np.concatenate(chunks)
    return PointSet(pts[box.contains(pts)], allow_duplicates=True)


def sample(cfg: PoissonConfig) -> PointSet:
    if cfg.mode is SamplingMode.CUBE:
        return sample_cube_construction(cfg)
    return sample_direct(cfg)


def count_in(points: PointSet | np.ndarray, box: Box) -> int:
    coords = points.coords if isinstance(points, PointSet) else np.asarray(points)
    if len(coords) == 0:
        return 0
    return int(box.contains(coords).sum())
