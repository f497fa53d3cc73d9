"""Analog-beamforming squint diagnostics: Dirichlet gain, MRT profile and the 3-dB rule."""

from __future__ import annotations

import math

import numpy as np
import scipy.optimize

from .channel import dirichlet_ratio, steering_factors
from .geometry import SPEED_OF_LIGHT, ArrayGeometry, BandSpec, Direction

ALPHA_3DB_LIMIT = 0.886
_BRACKET = (1e-6, 2.0)


def dirichlet_gain(n: int, x):
    """``F_N(x) = (1/N) (sin(N x/2) / sin(x/2))^2``, equal to N at multiples of 2*pi."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return dirichlet_ratio(n, x) ** 2 / n


def mrt_gain_ula(geom: ArrayGeometry, direction: Direction, band: BandSpec, f_rel):
    """Gain at relative frequency ``f_rel`` of a ULA steered by MRT at the carrier."""
    if not geom.is_ula:
        raise ValueError("MRT closed form applies to ULAs (n_y == 1) only")
    f = np.asarray(f_rel, dtype=float)
    if np.any(np.abs(f) > band.w / 2 * (1 + 1e-12)):
        raise ValueError("relative frequency outside the band")
    return dirichlet_gain(geom.n_x, 2 * np.pi * geom.d_x * direction.u_x * f / SPEED_OF_LIGHT)


def beam_pattern(geom: ArrayGeometry, weights: np.ndarray, direction: Direction,
                 band: BandSpec, f_rel: float) -> float:
    """``|a*(f) w|^2 / ||w||^2`` for fixed analog weights ``w`` seen from ``direction``.

    Only ``(f_c + f) u`` enters, so the pattern at ``f`` is the carrier pattern
    at the scaled direction ``(1 + f/f_c) u``.
    """
    w = np.asarray(weights, dtype=complex).ravel()
    if w.size != geom.n:
        raise ValueError(f"expected {geom.n} weights, got {w.size}")
    ax, ay = steering_factors(geom, direction, band.f_c + f_rel)
    row = np.kron(ax, ay)
    return float(abs(row @ w) ** 2 / np.vdot(w, w).real)


def _three_db_residual(alpha: float, n: int) -> float:
    h = math.pi * alpha / 2
    return math.sin(h) / (n * math.sin(h / n)) - 1 / math.sqrt(2)


def alpha_3db(n: int) -> float:
    """Dispersion factor at which MRT loses 3 dB at the band edge, for an n-element ULA."""
    if n < 2:
        raise ValueError("alpha_3db needs n >= 2")
    return scipy.optimize.bisect(_three_db_residual, *_BRACKET, args=(n,), xtol=1e-12,
                                 maxiter=200)
