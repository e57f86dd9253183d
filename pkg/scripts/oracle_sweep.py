"""Random sweep of the independent checks: degree oracles, scalar AAK, round trips.

Prints one summary line per check with the worst observed discrepancy, so
tolerance headroom can be read off directly.
"""
from dataclasses import dataclass

import numpy as np

from _config import parse_config
from superopt.hankel import aak_scalar, flatness, rank_degree
from superopt.nehari2x2 import superoptimal
from superopt.ratmat import mcmillan_degree, riesz_split_mat
from superopt.samples import random_analytic, random_ratmat, random_scalar_symbol
from superopt.thematic import assemble, random_thematic
from superopt.tolerances import circle_grid


@dataclass
class Config:
    seed: int = 0
    matrices: int = 500
    budget: int = 10
    scalars: int = 200
    round_trips: int = 50


def degree_sweep(rng, cfg):
    bad = 0
    for _ in range(cfg.matrices):
        A = random_ratmat(rng, budget=cfg.budget)
        bad += mcmillan_degree(A, "inside") != rank_degree(A, "inside")
    print(f"degree oracles: {bad} mismatches in {cfg.matrices} matrices (budget {cfg.budget})")


def aak_sweep(rng, cfg):
    worst = 0.0
    for _ in range(cfg.scalars):
        phi = random_scalar_symbol(rng, int(rng.integers(1, 9)))
        worst = max(worst, flatness(aak_scalar(phi).error))
    print(f"scalar AAK: worst error flatness {worst:.2e} over {cfg.scalars} symbols")


def round_trip_sweep(rng, cfg):
    zeta = circle_grid(256)
    worst = 0.0
    for _ in range(cfg.round_trips):
        th = random_thematic(rng)
        psi = assemble(th, th.t1)
        G = random_analytic(rng)
        minus, plus = riesz_split_mat(psi)
        r = superoptimal(minus + G)
        worst = max(worst, float(np.abs(r.approximant(zeta) - (G - plus)(zeta)).max()))
    print(f"superoptimal round trip: worst approximant error {worst:.2e} over {cfg.round_trips}")


def main(cfg):
    rng = np.random.default_rng(cfg.seed)
    degree_sweep(rng, cfg)
    aak_sweep(rng, cfg)
    round_trip_sweep(rng, cfg)


if __name__ == "__main__":
    main(parse_config(Config(), __doc__.splitlines()[0]))
