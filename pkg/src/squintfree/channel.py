"""LOS wideband steering vectors, their closed-form inner products and the link budget."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SPEED_OF_LIGHT, ArrayGeometry, BandSpec, Direction, element_positions

# phases this close to a multiple of 2*pi use the Taylor branch of the Dirichlet ratio
_SERIES_EPS = 1e-9


@dataclass(frozen=True)
class SteeringVector:
    """Channel row ``a*(f)``: entry n is ``exp(j 2 pi (f_c + f)/c u.r_n)``.

    The MRT beamformer for this frequency is ``entries.conj()``.
    """

    entries: np.ndarray
    direction: Direction
    f_rel: float

    @property
    def n(self) -> int:
        return self.entries.size

    def column(self) -> np.ndarray:
        """``a(f)``, the conjugate of the stored row."""
        return self.entries.conj()


@dataclass(frozen=True)
class LinkBudget:
    g_t: float
    g_r: float
    p_t: float
    d: float
    n0: float

    def __post_init__(self):
        for name in ("g_t", "g_r", "p_t", "d", "n0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def _check_in_band(band: BandSpec, *freqs: float):
    for f in freqs:
        if not band.contains(f):
            raise ValueError(f"relative frequency {f} outside [-{band.w / 2}, {band.w / 2}]")


def steering_factors(geom: ArrayGeometry, direction: Direction, f_abs: float):
    """x and y factors of ``a*`` at absolute frequency ``f_abs``."""
    k = 2 * np.pi * f_abs / SPEED_OF_LIGHT
    ax = np.exp(1j * k * direction.u_x * geom.x_coords())
    ay = np.exp(1j * k * direction.u_y * geom.y_coords())
    return ax, ay


def steering_vector(geom: ArrayGeometry, direction: Direction, band: BandSpec,
                    f_rel: float = 0.0, check_band: bool = True) -> SteeringVector:
    """Materialise ``a*(f)``; only sensible for modest N."""
    if check_band:
        _check_in_band(band, f_rel)
    phase = 2 * np.pi * (band.f_c + f_rel) / SPEED_OF_LIGHT
    entries = np.exp(1j * phase * (element_positions(geom) @ direction.as_array()))
    return SteeringVector(entries, direction, f_rel)


def dirichlet_ratio(n: int, x) -> np.ndarray:
    """``sum_k exp(j x (k - (n-1)/2))`` for k < n, i.e. ``sin(n x/2) / sin(x/2)``.

    Real-valued; exact value ``+-n`` at multiples of 2*pi.
    """
    x = np.asarray(x, dtype=float)
    k = np.round(x / (2 * np.pi))
    eps = x - 2 * np.pi * k
    # sin(n x/2)/sin(x/2) picks up (-1)^(k (n-1)) after reduction
    sign = np.where((k.astype(np.int64) * (n - 1)) % 2 == 0, 1.0, -1.0)
    small = np.abs(eps) < _SERIES_EPS
    safe = np.where(small, 1.0, eps)
    ratio = np.sin(n * safe / 2) / np.sin(safe / 2)
    series = n * (1 - (n * n - 1) * eps**2 / 24)
    return sign * np.where(small, series, ratio)


def inner_product_matrix(geom: ArrayGeometry, direction: Direction, f1, f2) -> np.ndarray:
    """``a*(f1) a(f2)`` for broadcastable frequency arrays, no band check.

    Only frequency differences enter, so the carrier drops out.
    """
    df = np.subtract.outer(np.asarray(f1, float), np.asarray(f2, float))
    scale = 2 * np.pi * df / SPEED_OF_LIGHT
    val = dirichlet_ratio(geom.n_x, scale * direction.u_x * geom.d_x)
    if geom.n_y > 1:
        val = val * dirichlet_ratio(geom.n_y, scale * direction.u_y * geom.d_y)
    return val.astype(complex)


def steering_inner_product(geom: ArrayGeometry, direction: Direction, band: BandSpec,
                           f1: float, f2: float) -> complex:
    """``a*(f1) a(f2)`` in O(1) as a product of two Dirichlet ratios."""
    _check_in_band(band, f1, f2)
    return complex(inner_product_matrix(geom, direction, f1, f2))


def snr(band: BandSpec, budget: LinkBudget) -> float:
    """Linear SNR ``lambda^2 G_t G_r P_t / ((4 pi D)^2 W N_0)``."""
    lam = band.wavelength
    return lam**2 * budget.g_t * budget.g_r * budget.p_t / (
        (4 * math.pi * budget.d) ** 2 * band.w * budget.n0)
