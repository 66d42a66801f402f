"""Flat-file formats: point CSVs, complex JSON and experiment configs."""
from __future__ import annotations

import configparser
import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .complexes import Flavor, SimplicialComplex
from .geometry import PointSet
from .poisson import Box, PoissonConfig, SamplingMode


class FormatError(ValueError):
    pass


# -- points -----------------------------------------------------------------


def parse_points(text: str, allow_duplicates: bool = False) -> PointSet:
    """Parse one point per row; an optional ``# dim=d`` header fixes the dimension."""
    dim = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s[1:].strip().replace(" ", "")
            if body.startswith("dim="):
                try:
                    dim = int(body[4:])
                except ValueError:
                    raise FormatError(f"line {lineno}: bad dimension header {s!r}") from None
            continue
        try:
            row = [float(x) for x in next(csv.reader([s]))]
        except ValueError:
            raise FormatError(f"line {lineno}: non-numeric entry in {s!r}") from None
        if not all(np.isfinite(row)):
            raise FormatError(f"line {lineno}: non-finite coordinate")
        if rows and len(row) != len(rows[0]):
            raise FormatError(f"line {lineno}: expected {len(rows[0])} columns, got {len(row)}")
        rows.append(row)
    if dim is not None and rows and len(rows[0]) != dim:
        raise FormatError(f"header says dim={dim} but rows have {len(rows[0])} columns")
    if not rows:
        if dim is None:
            raise FormatError("empty point file needs a '# dim=d' header")
        return PointSet.empty(dim)
    return PointSet(np.array(rows, dtype=float), allow_duplicates=allow_duplicates)


def format_points(X: PointSet) -> str:
    buf = io.StringIO()
    buf.write(f"# dim={X.dim}\n")
    for p in X.coords:
        buf.write(",".join(repr(float(x)) for x in p) + "\n")
    return buf.getvalue()


def read_points(path, allow_duplicates: bool = False) -> PointSet:
    return parse_points(Path(path).read_text(), allow_duplicates)


def write_points(path, X: PointSet) -> None:
    Path(path).write_text(format_points(X))


# -- complexes / json -------------------------------------------------------


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def read_complex(path) -> SimplicialComplex:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from None
    return SimplicialComplex.from_json(data)


def write_complex(path, K: SimplicialComplex) -> None:
    Path(path).write_text(dumps(K.to_json()))


# -- experiment config ------------------------------------------------------


@dataclass
class ExperimentConfig:
    kind: str = "isolation"
    intensity: float = 1.0
    window: Box | None = None
    seed: int = 0
    mode: SamplingMode = SamplingMode.DIRECT
    rho: float = 1.0
    flavor: Flavor = Flavor.RIPS
    target: SimplicialComplex | None = None
    representation: np.ndarray | None = None
    trials: int = 100
    delta: float | None = None
    plant: bool = False
    t_values: list = field(default_factory=list)
    window_sizes: list = field(default_factory=list)
    dim: int = 2
    bootstrap: int = 200
    threads: int | None = None

    def poisson(self) -> PoissonConfig:
        if self.window is None:
            raise FormatError("[process] window is required")
        return PoissonConfig(self.intensity, self.window, self.seed, self.mode)


KINDS = ("events", "isolation", "pendant", "percolation")


def _json_value(section, key, raw):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        raise FormatError(f"[{section}] {key}: expected a JSON value, got {raw!r}") from None


def parse_config(text: str) -> ExperimentConfig:
    """Read an INI-style config with [process], [complex], [target], [experiment]."""
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise FormatError(str(e)) from None
    known = {"process", "complex", "target", "experiment"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise FormatError(f"unknown sections: {sorted(unknown)}")
    cfg = ExperimentConfig()
    try:
        if cp.has_section("process"):
            p = cp["process"]
            cfg.intensity = p.getfloat("intensity", cfg.intensity)
            if "window" in p:
                cfg.window = Box.from_intervals(_json_value("process", "window", p["window"]))
            cfg.seed = p.getint("seed", cfg.seed)
            cfg.mode = SamplingMode(p.get("mode", cfg.mode.value).upper())
        if cp.has_section("complex"):
            c = cp["complex"]
            cfg.rho = c.getfloat("rho", cfg.rho)
            cfg.flavor = Flavor(c.get("flavor", cfg.flavor.value).upper())
        if cp.has_section("target"):
            t = cp["target"]
            if "maximal_faces" in t:
                faces = _json_value("target", "maximal_faces", t["maximal_faces"])
                cfg.target = SimplicialComplex.from_faces([tuple(f) for f in faces])
            if "representation" in t:
                rep = np.asarray(_json_value("target", "representation", t["representation"]),
                                 dtype=float)
                cfg.representation = rep
        if cp.has_section("experiment"):
            e = cp["experiment"]
            cfg.kind = e.get("kind", cfg.kind).lower()
            cfg.trials = e.getint("trials", cfg.trials)
            if "delta" in e:
                cfg.delta = e.getfloat("delta")
            cfg.plant = e.getboolean("plant", cfg.plant)
            if "t_values" in e:
                cfg.t_values = _json_value("experiment", "t_values", e["t_values"])
            if "window_sizes" in e:
                cfg.window_sizes = _json_value("experiment", "window_sizes", e["window_sizes"])
            cfg.dim = e.getint("dim", cfg.dim)
            cfg.bootstrap = e.getint("bootstrap", cfg.bootstrap)
            if "threads" in e:
                cfg.threads = e.getint("threads")
    except (ValueError, TypeError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"config: {e}") from None
    if cfg.kind not in KINDS:
        raise FormatError(f"[experiment] kind must be one of {KINDS}, got {cfg.kind!r}")
    if cfg.trials < 1:
        raise FormatError("[experiment] trials must be positive")
    if cfg.kind != "percolation":
        if cfg.target is None or cfg.representation is None:
            raise FormatError("[target] needs maximal_faces and representation")
        if cfg.kind != "events" and cfg.window is None:
            raise FormatError("[process] window is required")
    elif not cfg.t_values or not cfg.window_sizes:
        raise FormatError("[experiment] percolation needs t_values and window_sizes")
    return cfg


def read_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())
