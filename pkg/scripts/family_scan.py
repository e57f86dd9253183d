"""Degree profile of a family with a prescribed pattern of margin violations.

Builds the multi-parameter instance for (k, a, t_values, kappa), scans the
family parameter on a log grid plus the detected events, and prints every
row where the degrees change or the margin drops below two.
"""
from dataclasses import dataclass

from _config import parse_config
from superopt.counterexample import build_ekp
from superopt.thematic import check_bounds


@dataclass
class Config:
    k: int = 4
    a: float = 2.0
    t_values: tuple = (0.4, 0.6, 0.9)
    kappa: tuple = (1, 1, 1)
    n_scan: int = 100
    all_rows: bool = False


def main(cfg):
    ekp = build_ekp(cfg.k, cfg.a, list(cfg.t_values), list(cfg.kappa))
    v = check_bounds(ekp.thematic, n_scan=cfg.n_scan, raise_on_failure=False)
    print("events:")
    for e in v.report.events:
        print(f"  s={e.s:.6f} side={e.side:<8} drop={e.drop} at {complex(e.lam):.4f}")
    print(f"\n{'s':>10} {'deg P-':>7} {'deg P+':>7} {'margin':>7} {'deficit':>8}")
    prev = None
    for r in v.rows:
        key = (r.deg_minus, r.deg_plus)
        if cfg.all_rows or key != prev or r.margin < 2:
            print(f"{r.s:>10.6f} {r.deg_minus:>7} {r.deg_plus:>7} {r.margin:>7} {r.deficit:>8}")
        prev = key
    print(f"\nsum of deficits {v.deficit_sum}, deg P-u1 {v.deg_minus_u1}, "
          f"clauses {'all hold' if v.passed else 'failed: ' + ', '.join(v.failed)}")


if __name__ == "__main__":
    main(parse_config(Config(), __doc__.splitlines()[0]))
