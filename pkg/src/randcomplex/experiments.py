"""Monte Carlo drivers and closed-form event probabilities.

Every trial draws from its own stream ``derive_seed(seed, trial)``, so a
report depends only on (parameters, seed) and not on how trials are spread
over worker processes.
"""
from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from itertools import combinations

import numpy as np

from .complexes import Flavor, SimplicialComplex, build_complex, combinatorially_equivalent
from .detection import (
    connected_components,
    crossing_component,
    find_isolated_occurrences,
    find_pendant_occurrences,
)
from .geometry import PointSet, as_pointset, unit_ball_volume
from .genericity import genericity_margin
from .poisson import Box, PoissonConfig, SamplingMode, derive_seed, sample

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
THREADS_ENV = "RANDOMCOMPLEX_THREADS"


# -- closed forms -----------------------------------------------------------


def _elementary_symmetric(values) -> list[float]:
    e = [1.0]
    for x in values:
        e = [a + x * b for a, b in zip(e + [0.0], [0.0] + e)]
    return e


def dilated_box_volume(widths, r: float) -> float:
    """Volume of an axis-parallel box with the given widths plus a ball of radius ``r``.

    Steiner decomposition: each j-dimensional face of the box sweeps a
    (d-j)-ball, giving ``sum_j e_j(widths) * kappa_{d-j} * r^(d-j)`` where
    ``e_j`` is the j-th elementary symmetric polynomial of the widths.
    """
    widths = [float(w) for w in widths]
    if any(w < 0 for w in widths) or r < 0:
        raise ValueError("widths and radius must be nonnegative")
    d = len(widths)
    e = _elementary_symmetric(widths)
    total = 0.0
    for j in range(d + 1):
        k = d - j
        total += e[j] * (1.0 if k == 0 else unit_ball_volume(k)) * r ** k
    return total


def predict_cA(t: float, d: int, delta: float, n_vertices: int, vol_WI: float) -> float:
    """Probability that each vertex ball holds one point and the rest of W_I none."""
    if t <= 0 or delta <= 0 or n_vertices <= 0 or d <= 0:
        raise ValueError("t, d, delta and n_vertices must be positive")
    if vol_WI < 0:
        raise ValueError("vol_WI must be nonnegative")
    ball_mass = t * unit_ball_volume(d) * delta ** d
    if ball_mass > 1:
        logger.warning("t*kappa_d*delta^d = %.3g > 1; c_A is not a probability bound", ball_mass)
    return ball_mass ** n_vertices * math.exp(-t * vol_WI)


def predict_cB(t: float, vol_WO: float, vol_WI: float) -> float:
    """Void probability of the shell W_O \\ W_I."""
    if t <= 0:
        raise ValueError("t must be positive")
    if vol_WI < 0 or vol_WO < vol_WI:
        raise ValueError("need vol_WO >= vol_WI >= 0")
    return math.exp(-t * (vol_WO - vol_WI))


def binomial_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n) if n else math.nan


# -- report -----------------------------------------------------------------


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    trials: int
    counts: dict = field(default_factory=dict)
    frequencies: dict = field(default_factory=dict)
    stderr: dict = field(default_factory=dict)
    predictions: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    per_trial: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_json(self, include_timings: bool = False) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "config": self.config,
            "trials": self.trials,
            "counts": self.counts,
            "frequencies": self.frequencies,
            "stderr": self.stderr,
            "predictions": self.predictions,
            "checks": self.checks,
            "per_trial": self.per_trial,
            "extra": self.extra,
        }
        if include_timings:
            out["timings"] = self.timings
        return _jsonable(out)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


# -- trial runner -----------------------------------------------------------


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_trials(fn, trials: int, seed: int, threads: int | None = None) -> list:
    """Apply ``fn(trial_seed)`` to every trial; results are in trial order."""
    seeds = [derive_seed(seed, i) for i in range(trials)]
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or trials < 2 * threads:
        return [fn(s) for s in seeds]
    chunk = max(1, trials // (threads * 8))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, seeds, chunksize=chunk))


# -- helpers ----------------------------------------------------------------


def min_pair_distance(V: PointSet) -> float:
    c = V.coords
    return min((float(np.linalg.norm(c[i] - c[j])) for i, j in combinations(range(len(V)), 2)),
               default=math.inf)


def default_delta(V: PointSet, rho: float, flavor: Flavor) -> float:
    """Largest radius for which every δ-perturbation of ``V`` keeps its complex.

    ``min(alpha/2, margin/2)`` with alpha the smallest vertex spacing; a
    single vertex (no spacing, no margin) falls back to ``rho/2``.
    """
    bound = min(min_pair_distance(V) / 2, genericity_margin(V, rho, flavor) / 2)
    return bound if math.isfinite(bound) else rho / 2


def target_cap(target: SimplicialComplex) -> int:
    return max(1, target.dimension + 1)


def _dist_to_box(pts: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    gap = np.maximum(np.maximum(lo - pts, pts - hi), 0.0)
    return np.sqrt(np.einsum("ij,ij->i", gap, gap))


@dataclass(frozen=True)
class EventGeometry:
    """Boxes and volumes for the A/B events around a representation ``V``."""

    vertices: np.ndarray
    rho: float
    delta: float
    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def of(cls, V: PointSet, rho: float, delta: float) -> "EventGeometry":
        lo, hi = V.bounding_box()
        return cls(V.coords.copy(), float(rho), float(delta), lo, hi)

    @property
    def widths(self):
        return self.upper - self.lower

    @property
    def beta(self) -> float:
        return float(np.max(self.widths))

    @property
    def gamma(self) -> float:
        return self.beta + 2 * (self.delta + self.rho)

    @property
    def vol_inner(self) -> float:
        return dilated_box_volume(self.widths, self.delta)

    @property
    def vol_outer(self) -> float:
        return dilated_box_volume(self.widths, self.delta + self.rho)

    def sampling_box(self) -> Box:
        r = self.delta + self.rho
        return Box(tuple(self.lower - r), tuple(self.upper + r))


# -- event probabilities ----------------------------------------------------


def _event_trial(geom: EventGeometry, target: SimplicialComplex, t: float, flavor: Flavor,
                 trial_seed: int) -> tuple[bool, bool, bool]:
    pts = sample(PoissonConfig(t, geom.sampling_box(), trial_seed)).coords
    dist = _dist_to_box(pts, geom.lower, geom.upper)
    inner = dist < geom.delta
    shell = (dist < geom.delta + geom.rho) & ~inner
    ev_b = not bool(shell.any())
    P = pts[inner]
    nv = len(geom.vertices)
    ev_a = False
    if len(P) == nv:
        d2v = np.linalg.norm(P[:, None, :] - geom.vertices[None, :, :], axis=2)
        hits = d2v < geom.delta
        ev_a = bool(np.all(hits.sum(axis=0) == 1) and np.all(hits.sum(axis=1) == 1))
    ev_eq = False
    if len(P) == nv:
        K = build_complex(PointSet(P, allow_duplicates=True), geom.rho, flavor,
                          target_cap(target)).complex
        ev_eq, _ = combinatorially_equivalent(K, target)
    return ev_a, ev_b, ev_eq


def estimate_event_probabilities(target: SimplicialComplex, representation, rho: float,
                                 delta: float, t: float, trials: int, seed: int = 0,
                                 flavor: Flavor | str = Flavor.RIPS,
                                 threads: int | None = None) -> ExperimentReport:
    """Monte Carlo frequencies of the inner/shell events against c_A and c_B.

    W_I is the representation's bounding box dilated by ``delta``, W_O the
    same box dilated by ``delta + rho``; each trial samples the process on
    the bounding box of W_O and keeps the points inside W_O.
    """
    V = as_pointset(representation)
    flavor = Flavor(flavor)
    margin = genericity_margin(V, rho, flavor)
    alpha = min_pair_distance(V)
    if not delta > 0:
        raise ValueError("delta must be positive")
    if delta > margin / 2:
        raise ValueError(f"delta={delta} exceeds half the genericity margin ({margin / 2:.6g})")
    if delta > alpha / 2:
        raise ValueError(f"delta={delta} exceeds half the vertex spacing ({alpha / 2:.6g})")
    ok, _ = combinatorially_equivalent(build_complex(V, rho, flavor, target_cap(target)).complex,
                                       target)
    if not ok:
        raise ValueError("representation does not realize the target complex")

    geom = EventGeometry.of(V, rho, delta)
    d = V.dim
    cA = predict_cA(t, d, delta, len(V), geom.vol_inner)
    cB = predict_cB(t, geom.vol_outer, geom.vol_inner)

    t0 = time.perf_counter()
    results = run_trials(partial(_event_trial, geom, target, t, flavor), trials, seed, threads)
    elapsed = time.perf_counter() - t0

    A = np.array([r[0] for r in results], dtype=bool)
    B = np.array([r[1] for r in results], dtype=bool)
    E = np.array([r[2] for r in results], dtype=bool)
    events = {"A": A, "B": B, "equivalent": E, "equivalent_and_B": E & B, "A_and_B": A & B}
    counts = {k: int(v.sum()) for k, v in events.items()}
    freqs = {k: c / trials for k, c in counts.items()}
    se = {k: binomial_se(p, trials) for k, p in freqs.items()}
    preds = {"cA": cA, "cB": cB, "cA_cB": cA * cB}
    null_se = {"A": binomial_se(cA, trials), "B": binomial_se(cB, trials),
               "A_and_B": binomial_se(cA * cB, trials)}
    z = {k: (freqs[k] - preds[p]) / null_se[k] if null_se[k] > 0 else 0.0
         for k, p in (("A", "cA"), ("B", "cB"), ("A_and_B", "cA_cB"))}
    indep_rhs = freqs["A"] * freqs["B"]
    indep_se = math.sqrt(se["equivalent_and_B"] ** 2 + binomial_se(indep_rhs, trials) ** 2)
    checks = {
        "A_within_3sigma": abs(z["A"]) <= 3,
        "B_within_3sigma": abs(z["B"]) <= 3,
        "equivalent_geq_A": counts["equivalent"] >= counts["A"],
        "independence_bound": freqs["equivalent_and_B"] >= indep_rhs - 3 * indep_se,
        "z_scores": z,
    }
    cfg = {"t": t, "rho": rho, "delta": delta, "flavor": flavor.value, "seed": seed,
           "dim": d, "n_vertices": len(V), "vol_WI": geom.vol_inner, "vol_WO": geom.vol_outer,
           "representation": V.coords.tolist(), "target": target.to_json()}
    return ExperimentReport("event_probabilities", cfg, trials, counts, freqs, se, preds, checks,
                            extra={"margin": margin, "alpha": alpha, "null_stderr": null_se},
                            timings={"total_s": elapsed})


# -- isolation --------------------------------------------------------------


def _isolation_trial(target: SimplicialComplex, rho: float, t: float, window: Box,
                     flavor: Flavor, mode: SamplingMode, trial_seed: int) -> tuple[int, int]:
    X = sample(PoissonConfig(t, window, trial_seed, mode))
    G = build_complex(X, rho, flavor, target_cap(target))
    reports = find_isolated_occurrences(G, target, window)
    return sum(not r.undecided for r in reports), sum(r.undecided for r in reports)


def run_isolation_experiment(target: SimplicialComplex, representation, rho: float, t: float,
                             window: Box, trials: int, seed: int = 0,
                             flavor: Flavor | str = Flavor.RIPS, delta: float | None = None,
                             mode: SamplingMode | str = SamplingMode.DIRECT,
                             threads: int | None = None) -> ExperimentReport:
    """Count interior-certified isolated copies of ``target`` per sampled window.

    The report gives the mean count, the count per unit of eroded window
    volume (points at least ``rho`` inside), the count per disjoint cell of
    side ``gamma = beta + 2(delta + rho)``, and the per-cell bound c_A*c_B.
    """
    V = as_pointset(representation)
    flavor = Flavor(flavor)
    mode = SamplingMode(mode)
    if delta is None:
        delta = default_delta(V, rho, flavor)
    geom = EventGeometry.of(V, rho, delta)
    gamma = geom.gamma
    n_cells = int(np.prod(np.floor(window.widths / gamma)))
    if n_cells < 1:
        raise ValueError(f"window too small: every side must be at least gamma={gamma:.6g}")
    cA = predict_cA(t, V.dim, delta, len(V), geom.vol_inner)
    cB = predict_cB(t, geom.vol_outer, geom.vol_inner)

    t0 = time.perf_counter()
    results = run_trials(partial(_isolation_trial, target, rho, t, window, flavor, mode),
                         trials, seed, threads)
    elapsed = time.perf_counter() - t0
    counts = np.array([r[0] for r in results], dtype=float)
    undecided = int(sum(r[1] for r in results))
    eroded = window.eroded_volume(rho)
    mean = float(counts.mean())
    sd = float(counts.std(ddof=1)) if trials > 1 else 0.0
    se = sd / math.sqrt(trials)
    per_cell = mean / n_cells
    per_cell_se = se / n_cells
    intensity = mean / eroded if eroded > 0 else math.nan
    intensity_se = se / eroded if eroded > 0 else math.nan
    cfg = {"t": t, "rho": rho, "delta": delta, "flavor": flavor.value, "seed": seed,
           "mode": mode.value, "window": window.intervals(), "target": target.to_json(),
           "representation": V.coords.tolist()}
    return ExperimentReport(
        "isolation", cfg, trials,
        counts={"occurrences": int(counts.sum()), "undecided": undecided},
        frequencies={"mean_count": mean, "per_cell": per_cell, "intensity": intensity,
                     "intensity_ci95": [intensity - 1.96 * intensity_se,
                                        intensity + 1.96 * intensity_se]},
        stderr={"mean_count": se, "per_cell": per_cell_se, "intensity": intensity_se},
        predictions={"cA": cA, "cB": cB, "cA_cB": cA * cB},
        checks={"per_cell_bound": per_cell >= cA * cB - 3 * per_cell_se},
        per_trial={"occurrences": counts.astype(int).tolist()},
        extra={"gamma": gamma, "n_cells": n_cells, "eroded_volume": eroded,
               "window_volume": window.volume},
        timings={"total_s": elapsed},
    )


def isolated_vertex_intensity(t: float, rho: float, d: int) -> float:
    """Intensity of points with no other point within ``rho`` (Slivnyak-Mecke)."""
    return t * math.exp(-t * unit_ball_volume(d) * rho ** d)


# -- pendants ---------------------------------------------------------------


@dataclass(frozen=True)
class PlantedPendant:
    points: PointSet
    pendant: tuple[int, ...]
    bridge: tuple[int, int]  # (host-side vertex, attachment vertex)
    backbone: tuple[int, ...]


def _reflect_to(u: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Householder reflection matrix sending unit ``u`` to unit ``target``."""
    w = u - target
    nw = np.linalg.norm(w)
    if nw < 1e-15:
        return np.eye(len(u))
    w = w / nw
    return np.eye(len(u)) - 2.0 * np.outer(w, w)


def plant_pendant(background: PointSet, pendant, rho: float, window: Box, axis: int = 0,
                  spacing: float = 0.9) -> PlantedPendant:
    """Inject a crossing backbone with a pendant copy of ``pendant`` into ``background``.

    A straight chain of points at spacing ``spacing * rho`` crosses the
    window along ``axis`` through its center.  From the middle of it a stem
    rises along the next axis and ends one step below the pendant's
    attachment vertex (its vertex farthest from its centroid, reflected to
    face the stem).  Background points within ``rho`` of a pendant vertex are
    removed, so the pendant meets the rest only through the stem edge.
    """
    V = as_pointset(pendant)
    d = window.dim
    if d < 2:
        raise ValueError("planting needs d >= 2")
    if V.dim != d:
        raise ValueError("pendant dimension does not match the window")
    up = (axis + 1) % d
    step = spacing * rho
    e_axis = np.eye(d)[axis]
    e_up = np.eye(d)[up]
    center = (np.asarray(window.lower) + np.asarray(window.upper)) / 2

    lo, hi = window.lower[axis], window.upper[axis]
    xs = np.arange(lo + step / 2, hi, step)
    backbone = np.array([center + (x - center[axis]) * e_axis for x in xs])
    mid = backbone[np.argmin(np.abs(xs - center[axis]))]

    P = V.coords - V.coords.mean(axis=0)
    far = int(np.argmax(np.linalg.norm(P, axis=1)))
    if np.linalg.norm(P[far]) > 0:
        P = P @ _reflect_to(P[far] / np.linalg.norm(P[far]), -e_up).T
    stem = np.array([mid + k * step * e_up for k in (1, 2)])
    top = stem[-1]
    P = P + (top + step * e_up - P[far])

    others = [i for i in range(len(P)) if i != far]
    if others:
        gap = min(float(np.linalg.norm(P[i] - top)) for i in others)
        if gap <= rho * (1 + 1e-6):
            raise ValueError("pendant vertices come within rho of the stem; cannot plant")
    planted = np.vstack([backbone, stem, P])
    if not np.all(window.contains(planted)):
        raise ValueError("planted structure does not fit in the window")

    bg = background.coords
    if len(bg):
        d2p = np.min(np.linalg.norm(bg[:, None, :] - P[None, :, :], axis=2), axis=1)
        bg = bg[d2p > rho * (1 + 1e-6)]
    pts = np.vstack([bg.reshape(-1, d), planted])
    off = len(bg)
    n_bb = len(backbone)
    pendant_ids = tuple(off + n_bb + 2 + i for i in range(len(P)))
    bridge = (off + n_bb + 1, off + n_bb + 2 + far)
    return PlantedPendant(PointSet(pts, allow_duplicates=True), pendant_ids, bridge,
                          tuple(range(off, off + n_bb)))


def _pendant_trial(target: SimplicialComplex, representation: PointSet | None, rho: float,
                   t: float, window: Box, flavor: Flavor, mode: SamplingMode,
                   trial_seed: int) -> tuple[int, bool, bool]:
    X = sample(PoissonConfig(t, window, trial_seed, mode))
    planted = None
    if representation is not None:
        planted = plant_pendant(X, representation, rho, window)
        X = planted.points
    G = build_complex(X, rho, flavor, target_cap(target))
    dec = connected_components(G, window)
    host = crossing_component(G, window, 0, dec)
    if host is None:
        return 0, False, False
    reports = find_pendant_occurrences(G, target, host, dec, window)
    found = planted is not None and any(
        set(r.vertices) == set(planted.pendant) and tuple(r.bridge) == planted.bridge
        for r in reports if not r.undecided)
    return sum(not r.undecided for r in reports), True, found


def run_pendant_experiment(target: SimplicialComplex, representation, rho: float, t: float,
                           window: Box, trials: int, seed: int = 0,
                           flavor: Flavor | str = Flavor.RIPS, plant: bool = False,
                           mode: SamplingMode | str = SamplingMode.DIRECT,
                           threads: int | None = None) -> ExperimentReport:
    """Count pendant copies of ``target`` on the window's crossing component.

    With ``plant=True`` every trial also injects a known pendant copy of
    ``representation`` (see :func:`plant_pendant`) and records whether it
    was recovered.
    """
    V = as_pointset(representation)
    flavor = Flavor(flavor)
    mode = SamplingMode(mode)
    t0 = time.perf_counter()
    results = run_trials(
        partial(_pendant_trial, target, V if plant else None, rho, t, window, flavor, mode),
        trials, seed, threads)
    elapsed = time.perf_counter() - t0
    counts = np.array([r[0] for r in results], dtype=float)
    has_host = np.array([r[1] for r in results], dtype=bool)
    found = np.array([r[2] for r in results], dtype=bool)
    mean = float(counts.mean())
    se = float(counts.std(ddof=1)) / math.sqrt(trials) if trials > 1 else 0.0
    no_host = 1.0 - float(has_host.mean())
    freqs = {"mean_count": mean, "no_host_fraction": no_host,
             "per_unit_volume": mean / window.volume}
    if plant:
        freqs["planted_recovered"] = float(found.mean())
    cfg = {"t": t, "rho": rho, "flavor": flavor.value, "seed": seed, "mode": mode.value,
           "window": window.intervals(), "plant": plant, "target": target.to_json(),
           "representation": V.coords.tolist()}
    if no_host > 0.5:
        logger.warning("no crossing host in %.0f%% of trials; t may be subcritical", 100 * no_host)
    return ExperimentReport(
        "pendant", cfg, trials,
        counts={"occurrences": int(counts.sum()), "no_host": int((~has_host).sum()),
                "planted_recovered": int(found.sum())},
        frequencies=freqs,
        stderr={"mean_count": se, "no_host_fraction": binomial_se(no_host, trials)},
        per_trial={"occurrences": counts.astype(int).tolist()},
        timings={"total_s": elapsed},
    )


# -- percolation ------------------------------------------------------------


def isotonic_increasing(y, w=None) -> np.ndarray:
    """Weighted least-squares nondecreasing fit (pool adjacent violators)."""
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=float)
    blocks: list[list[float]] = []  # [mean, weight, length]
    for yi, wi in zip(y, w):
        blocks.append([yi, wi, 1])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            m2, w2, n2 = blocks.pop()
            m1, w1, n1 = blocks.pop()
            blocks.append([(m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2, n1 + n2])
    return np.concatenate([[m] * n for m, _, n in blocks]) if blocks else np.array([])


def crossing_threshold(t_values, fractions, level: float = 0.5) -> float | None:
    """First ``t`` where the curve reaches ``level``, linearly interpolated."""
    t_values = list(t_values)
    for i, f in enumerate(fractions):
        if f >= level:
            if i == 0:
                return float(t_values[0])
            f0 = fractions[i - 1]
            t_lo, t_hi = t_values[i - 1], t_values[i]
            if f == f0:
                return float(t_hi)
            return float(t_lo + (level - f0) * (t_hi - t_lo) / (f - f0))
    return None


def _crossing_trial(rho: float, t: float, window: Box, trial_seed: int) -> bool:
    X = sample(PoissonConfig(t, window, trial_seed))
    G = build_complex(X, rho, Flavor.RIPS, dim_cap=1)
    return crossing_component(G, window, 0) is not None


def percolation_probe(rho: float, t_values, window_sizes, trials: int, seed: int = 0,
                      dim: int = 2, bootstrap: int = 200,
                      threads: int | None = None) -> ExperimentReport:
    """Side-to-side crossing frequency along the first axis for each (t, window side)."""
    t_values = [float(t) for t in t_values]
    if any(b < a for a, b in zip(t_values, t_values[1:])):
        raise ValueError("t_values must be sorted ascending")
    window_sizes = [float(L) for L in window_sizes]
    rows = []
    curves: dict[float, dict] = {}
    t0 = time.perf_counter()
    for wi, L in enumerate(window_sizes):
        window = Box.cube(L, dim)
        fr, se = [], []
        for ti, t in enumerate(t_values):
            if t <= 0:
                hits = [False] * trials
            else:
                hits = run_trials(partial(_crossing_trial, rho, t, window), trials,
                                  derive_seed(seed, wi, ti), threads)
            p = float(np.mean(hits))
            fr.append(p)
            se.append(binomial_se(p, trials))
            rows.append({"t": t, "window": L, "crossing_fraction": p, "stderr": se[-1]})
        smooth = isotonic_increasing(fr)
        # deviation allowance uses the fitted p, floored at one trial's worth
        allow = [3 * max(binomial_se(float(s), trials), 1.0 / trials) for s in smooth]
        curves[L] = {"fractions": fr, "stderr": se, "isotonic": smooth.tolist(),
                     "monotone_within_3sigma": bool(np.all(np.abs(np.array(fr) - smooth)
                                                           <= np.array(allow)))}
    elapsed = time.perf_counter() - t0

    largest = max(window_sizes)
    t_hat = crossing_threshold(t_values, curves[largest]["isotonic"])
    ci = None
    if t_hat is not None and bootstrap > 0:
        rng = np.random.default_rng(derive_seed(seed, 10**6))
        p = np.array(curves[largest]["fractions"])
        draws = []
        for _ in range(bootstrap):
            boot = rng.binomial(trials, p) / trials
            th = crossing_threshold(t_values, isotonic_increasing(boot))
            if th is not None:
                draws.append(th)
        if draws:
            ci = [float(np.percentile(draws, 2.5)), float(np.percentile(draws, 97.5))]
    cfg = {"rho": rho, "t_values": t_values, "window_sizes": window_sizes, "dim": dim,
           "seed": seed, "bootstrap": bootstrap}
    return ExperimentReport(
        "percolation", cfg, trials,
        frequencies={str(L): c["fractions"] for L, c in curves.items()},
        stderr={str(L): c["stderr"] for L, c in curves.items()},
        checks={str(L): c["monotone_within_3sigma"] for L, c in curves.items()},
        extra={"rows": rows, "isotonic": {str(L): c["isotonic"] for L, c in curves.items()},
               "t_perc_estimate": t_hat, "t_perc_ci95": ci},
        timings={"total_s": elapsed},
    )
