"""Monte Carlo frequencies of the two events against their closed-form predictions."""
import argparse
import json
import math
from dataclasses import dataclass

import numpy as np

from randcomplex import SimplicialComplex
from randcomplex.experiments import estimate_event_probabilities


@dataclass
class Settings:
    intensity: float = 1.0
    rho: float = 0.4
    delta: float = 0.1
    side: float = 0.2
    trials: int = 100_000
    seed: int = 0
    flavor: str = "RIPS"


def main(argv=None):
    s = Settings()
    ap = argparse.ArgumentParser(description=__doc__)
    for name, val in vars(s).items():
        ap.add_argument(f"--{name}", type=type(val), default=val)
    s = Settings(**vars(ap.parse_args(argv)))
    rep = np.array([(0, 0), (s.side, 0), (s.side / 2, s.side * math.sqrt(3) / 2)])
    r = estimate_event_probabilities(SimplicialComplex.from_faces([(0, 1, 2)]), rep, s.rho,
                                     s.delta, s.intensity, s.trials, seed=s.seed, flavor=s.flavor)
    print(json.dumps({"frequencies": r.frequencies, "predictions": r.predictions,
                      "checks": r.checks}, indent=2, default=str))


if __name__ == "__main__":
    main()
