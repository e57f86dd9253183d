"""Numerical thresholds shared by every module.

The values are fixed for double precision at degrees up to about 16.
"""
from dataclasses import asdict, dataclass

import numpy as np

EPS_MATCH = 1e-9      # root/pole coincidence, relative to 1 + |lambda|
EPS_CIRCLE = 1e-8     # band around the unit circle treated as "on" it
EPS_RANK = 1e-8       # singular values below EPS_RANK * scale are zero
# Global Hankel ranks: closed-form Markov data is accurate to ~1e-15, while
# genuine singular values of clustered degree-10 symbols reach ~1e-9 * scale.
EPS_HANKEL_RANK = 1e-11
ROOT_CLUSTER = 1e-6   # computed roots closer than this merge into one multiple root
GRID_SIZE = 256


@dataclass(frozen=True)
class Tolerances:
    eps_match: float = EPS_MATCH
    eps_circle: float = EPS_CIRCLE
    eps_rank: float = EPS_RANK
    eps_hankel_rank: float = EPS_HANKEL_RANK
    root_cluster: float = ROOT_CLUSTER
    grid_size: int = GRID_SIZE
    identity: float = 1e-8
    flatness: float = 1e-7

    def as_dict(self):
        return asdict(self)


def circle_grid(n=GRID_SIZE, radius=1.0):
    """n equispaced points on the circle of the given radius (offset off the real axis)."""
    theta = 2 * np.pi * (np.arange(n) + 0.5) / n
    return radius * np.exp(1j * theta)
