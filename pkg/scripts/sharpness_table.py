"""Degrees of the explicit instances where the analytic-part bound is attained.

For each k the table shows (deg P-, deg P+) of Psi from both degree oracles,
and (deg Phi, deg of the superoptimal approximant) recomputed end to end
from Phi = P_minus Psi alone.
"""
import time
from dataclasses import dataclass

from _config import parse_config
from superopt.counterexample import build_kp
from superopt.nehari2x2 import superopt_degree_report
from superopt.thematic import degrees


@dataclass
class Config:
    k_values: tuple = (2, 3, 4, 5)
    a: float = 2.0
    t: float = 0.5


def main(cfg):
    print(f"{'k':>3} {'deg P-':>7} {'deg P+':>7} {'2k-3':>5} {'deg Phi':>8} {'deg A':>6} {'t1':>8} {'sec':>6}")
    for k in cfg.k_values:
        start = time.perf_counter()
        kp = build_kp(k, cfg.a, cfg.t)
        dm, dp = degrees(kp.psi)
        rep = superopt_degree_report(kp.phi)
        sec = time.perf_counter() - start
        print(f"{k:>3} {dm:>7} {dp:>7} {2 * k - 3:>5} {rep.deg_phi:>8} {rep.deg_approx:>6} "
              f"{rep.t1:>8.4f} {sec:>6.2f}")


if __name__ == "__main__":
    main(parse_config(Config(), __doc__.splitlines()[0]))
