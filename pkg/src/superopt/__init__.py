"""Rational superoptimal approximation for 2x2 matrix functions on the circle."""
from .ratfun import INF, RatFun, Region, blaschke, riesz_split, spectral_factor, winding_number
from .ratmat import RatMat, local_degree, mcmillan_degree, potapov_product, PotapovFactor
from .hankel import aak_scalar, build_hankel, hankel_norm, rank_degree, singular_shift_check
from .thematic import ThematicData, assemble, check_bounds, disturbing_numbers, verify_identities
from .nehari2x2 import superopt_degree_report, superoptimal, verify_very_bad
from .counterexample import build_ekp, build_kp, interpolate_blaschke

__version__ = "0.1.0"
