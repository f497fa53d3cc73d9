"""Array layouts, steering directions and squint-factor bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform planar array with ``n_x * n_y`` elements; a ULA has ``n_y == 1``.

    Element ``n`` sits at grid index ``(n // n_y, n % n_y)`` so that the
    steering vector is the Kronecker product of the x and y factors.
    """

    n_x: int
    n_y: int = 1
    d_x: float = 1.0
    d_y: float = 1.0

    def __post_init__(self):
        if int(self.n_x) != self.n_x or int(self.n_y) != self.n_y:
            raise ValueError("element counts must be integers")
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError(f"element counts must be >= 1, got ({self.n_x}, {self.n_y})")
        if not (self.d_x > 0 and self.d_y > 0):
            raise ValueError(f"spacings must be positive, got ({self.d_x}, {self.d_y})")

    @classmethod
    def half_wavelength(cls, n_x: int, n_y: int, f_c: float) -> "ArrayGeometry":
        """Array with lambda/2 spacing at carrier ``f_c``."""
        d = SPEED_OF_LIGHT / f_c / 2
        return cls(n_x, n_y, d, d)

    @property
    def n(self) -> int:
        return self.n_x * self.n_y

    @property
    def is_ula(self) -> bool:
        return self.n_y == 1

    @property
    def l_x(self) -> float:
        return self.n_x * self.d_x

    @property
    def l_y(self) -> float:
        return self.n_y * self.d_y

    def x_coords(self) -> np.ndarray:
        return self.d_x * (np.arange(self.n_x) - (self.n_x - 1) / 2)

    def y_coords(self) -> np.ndarray:
        return self.d_y * (np.arange(self.n_y) - (self.n_y - 1) / 2)


@dataclass(frozen=True)
class Direction:
    """Steering target in uv-coordinates."""

    u_x: float
    u_y: float = 0.0

    def __post_init__(self):
        # small slack for round-off from angle conversions
        if self.u_x**2 + self.u_y**2 > 1 + 1e-12:
            raise ValueError(f"direction ({self.u_x}, {self.u_y}) outside the unit disk")

    @property
    def norm(self) -> float:
        return math.hypot(self.u_x, self.u_y)

    @property
    def is_broadside(self) -> bool:
        return self.u_x == 0 and self.u_y == 0

    def as_array(self) -> np.ndarray:
        return np.array([self.u_x, self.u_y])


@dataclass(frozen=True)
class BandSpec:
    """Carrier ``f_c`` and bandwidth ``w`` in Hz; relative frequencies span [-w/2, w/2]."""

    f_c: float
    w: float

    def __post_init__(self):
        if not (self.f_c > 0 and self.w > 0):
            raise ValueError("carrier and bandwidth must be positive")
        if self.w >= 2 * self.f_c:
            raise ValueError("bandwidth must be smaller than twice the carrier")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c

    def contains(self, f_rel: float, slack: float = 1e-12) -> bool:
        return abs(f_rel) <= self.w / 2 * (1 + slack)

    def quadrature(self, k_nodes: int) -> tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes on [-w/2, w/2] with weights normalised to sum to 1."""
        if k_nodes < 1:
            raise ValueError("need at least one quadrature node")
        x, wts = np.polynomial.legendre.leggauss(k_nodes)
        return x * (self.w / 2), wts / 2


@dataclass(frozen=True)
class SquintFactor:
    """Dispersion factor of a planar array towards one direction.

    The projected-aperture geometry ``l1, l2, l3`` is ``None`` at exact
    broadside, where ``norm == 0``.
    """

    alpha_x: float
    alpha_y: float

    @property
    def norm(self) -> float:
        return math.hypot(self.alpha_x, self.alpha_y)

    @property
    def alpha_up(self) -> float:
        return abs(self.alpha_x) + abs(self.alpha_y)

    @property
    def is_broadside(self) -> bool:
        return self.norm == 0

    @property
    def l1(self) -> Optional[float]:
        if self.is_broadside:
            return None
        return self.alpha_up / self.norm

    @property
    def l2(self) -> Optional[float]:
        if self.is_broadside:
            return None
        return abs(abs(self.alpha_x) - abs(self.alpha_y)) / self.norm

    @property
    def l3(self) -> Optional[float]:
        if self.is_broadside:
            return None
        return self.norm / max(abs(self.alpha_x), abs(self.alpha_y))

    def alpha_lo(self, delta: float) -> float:
        if not 0 <= delta <= 1:
            raise ValueError(f"delta must lie in [0, 1], got {delta}")
        if self.is_broadside:
            return 0.0
        return self.norm * ((1 - delta) * self.l1 + delta * self.l2)


def element_positions(geom: ArrayGeometry) -> np.ndarray:
    """Centered element positions as an ``(N, 2)`` array of (x, y) in meters."""
    xx, yy = np.meshgrid(geom.x_coords(), geom.y_coords(), indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def uv_from_angles(theta: float, phi: float) -> Direction:
    """Direction from azimuth ``theta`` and zenith ``phi``, both in degrees."""
    th, ph = math.radians(theta), math.radians(phi)
    return Direction(math.sin(ph) * math.cos(th), math.sin(ph) * math.sin(th))


def squint_factor(geom: ArrayGeometry, direction: Direction, band: BandSpec) -> SquintFactor:
    # (W / f_c) * (L u / lambda) collapses to W L u / c
    scale = band.w / SPEED_OF_LIGHT
    return SquintFactor(scale * geom.l_x * direction.u_x, scale * geom.l_y * direction.u_y)


def required_rf_chains(sf: SquintFactor, additional: int = 0) -> int:
    """``ceil(alpha_up) + additional``, never below one chain."""
    if additional < 0:
        raise ValueError("additional chain count must be nonnegative")
    return max(1, _ceil(sf.alpha_up) + additional)


def _ceil(x: float, tol: float = 1e-9) -> int:
    # values within tol above an integer are round-off, not a fresh chain
    return math.ceil(x - tol)
