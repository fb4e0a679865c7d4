"""Winding-sector areas of closed planar random paths.

Two engines under one roof: an analytic engine evaluating the closed-form
and integral expressions for mean winding-sector areas of closed planar
Brownian paths, and a Monte Carlo engine sampling exact uniform closed
walks on the square lattice with per-cell winding-sector accounting.  The
campaign layer runs both and compares them.
"""

from .analytic import (
    Estimate,
    PaperConstants,
    SectorLabel,
    WindingPhase,
    c22_series,
    circle_overlap_reference,
    constant_cj,
    constant_cjm,
    constant_dj,
    f_of_x,
    g_alpha,
    i_nj,
    mean_s,
    mean_s00,
    mean_s_asymptotic,
    mean_s_minus_s0_asymptotic,
    mean_s_tuple,
    mean_sn,
    mean_sn_asymptotic,
    overlap_two_paths,
    phi_q,
    phi_q_asymptotic,
    s0_limit,
    s0_overlap_two_paths,
    sector_sum_ak,
    sector_transform,
    sum_sn_2,
)
from .bessel import bessel_i, bessel_k
from .campaign import CampaignConfig, CampaignReport, run_campaign
from .quadrature import (
    Finite,
    Infinite,
    QuadResult,
    QuadSpec,
    QuadratureError,
    SemiInfinite,
    UnsupportedDimensionError,
    integrate_1d,
    integrate_nd,
)
from .walks import ClosedWalk, RunSeed, brownian_time, sample_closed_walk
from .winding import SectorTally, WindingField, inside_mask, signed_area, tally, winding_field

__version__ = "0.1.0"
