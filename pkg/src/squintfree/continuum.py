"""Spectra of the continuous-aperture sinc operators.

The 1-D operator acts on L2([-1/2, 1/2]) with kernel
``sin(pi a (r - r')) / (pi (r - r'))``.  A planar aperture reduces to the same
kernel at bandwidth ``||alpha||`` weighted by the trapezoidal width profile of
the unit square projected onto ``alpha / ||alpha||``.  Both are discretised
by Nystrom's method on Gauss-Legendre nodes with symmetric weighting, which
keeps the matrices real symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.integrate

from .geometry import ArrayGeometry, BandSpec, Direction, SquintFactor, squint_factor
from .spectra import correlation_matrix, spectrum_dense

MIN_NODES = 8


@dataclass(frozen=True)
class KernelSpectrum:
    alpha: Union[float, tuple[float, float]]
    eigenvalues: np.ndarray
    nodes: int

    def __getitem__(self, ell: int) -> float:
        # eigenvalues past the resolved ones are numerically zero
        return float(self.eigenvalues[ell]) if ell < len(self.eigenvalues) else 0.0

    def partial_sum(self, count: int) -> float:
        return float(np.sum(self.eigenvalues[:count]))


@dataclass(frozen=True)
class WeightProfile:
    """Trapezoid through ``(-l1/2, 0), (-l2/2, l3), (l2/2, l3), (l1/2, 0)``."""

    breakpoints: tuple[tuple[float, float], ...]

    @property
    def half_width(self) -> float:
        return self.breakpoints[-1][0]

    @property
    def plateau_half_width(self) -> float:
        return self.breakpoints[2][0]

    def __call__(self, x) -> np.ndarray:
        xs, ys = zip(*self.breakpoints)
        return np.interp(x, xs, ys, left=0.0, right=0.0)

    def area(self) -> float:
        (x0, _), (x1, h), (x2, _), (x3, _) = self.breakpoints
        return h * ((x3 - x0) + (x2 - x1)) / 2


def default_kernel_nodes(alpha: float) -> int:
    return 50 + 10 * math.ceil(alpha)


def _sinc_kernel(bw: float, x: np.ndarray) -> np.ndarray:
    """``sin(pi bw (x - x')) / (pi (x - x'))`` with the diagonal set to ``bw``."""
    return bw * np.sinc(bw * np.subtract.outer(x, x))


def _nystrom(bw: float, x: np.ndarray, wts: np.ndarray) -> np.ndarray:
    s = np.sqrt(wts)
    return s[:, None] * _sinc_kernel(bw, x) * s[None, :]


def _gauss_panel(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return (b - a) / 2 * x + (a + b) / 2, (b - a) / 2 * w


def ula_kernel_spectrum(alpha: float, n_nodes: Optional[int] = None) -> KernelSpectrum:
    """Nystrom eigenvalues of the 1-D sinc operator, clipped to ``[0, 1 + 1e-9]``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    n_nodes = default_kernel_nodes(alpha) if n_nodes is None else n_nodes
    if n_nodes < MIN_NODES:
        raise ValueError(f"need at least {MIN_NODES} nodes, got {n_nodes}")
    x, w = _gauss_panel(-0.5, 0.5, n_nodes)
    vals = raw_ula_eigenvalues(alpha, x, w)
    return KernelSpectrum(alpha, np.clip(vals, 0.0, 1 + 1e-9), n_nodes)


def raw_ula_eigenvalues(alpha: float, x: np.ndarray, w: np.ndarray) -> np.ndarray:
    vals = np.linalg.eigvalsh(_nystrom(alpha, x, w))
    return vals[::-1]


def polarization_count(spec: KernelSpectrum, epsilon: float = 0.5) -> int:
    """Number of eigenvalues above ``epsilon``."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return int(np.count_nonzero(spec.eigenvalues > epsilon))


def upa_weight_profile(sf: SquintFactor) -> WeightProfile:
    if sf.is_broadside:
        raise ValueError("weight profile undefined at broadside")
    l1, l2, l3 = sf.l1, sf.l2, sf.l3
    return WeightProfile(((-l1 / 2, 0.0), (-l2 / 2, l3), (l2 / 2, l3), (l1 / 2, 0.0)))


def _profile_nodes(profile: WeightProfile, n_nodes: int):
    """Composite Gauss-Legendre rule with panel breaks at the profile's kinks."""
    h1, h2 = profile.half_width, profile.plateau_half_width
    if h1 - h2 <= 1e-12 * h1:
        return _gauss_panel(-h1, h1, n_nodes)
    if h2 <= 1e-12 * h1:
        edges = [-h1, 0.0, h1]
    else:
        edges = [-h1, -h2, h2, h1]
    lengths = np.diff(edges)
    counts = np.maximum(MIN_NODES, np.round(n_nodes * lengths / lengths.sum()).astype(int))
    parts = [_gauss_panel(a, b, int(m)) for a, b, m in zip(edges[:-1], edges[1:], counts)]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def upa_reduced_spectrum(sf: SquintFactor, n_nodes: Optional[int] = None) -> KernelSpectrum:
    """Eigenvalues of the planar operator via its weighted 1-D reduction."""
    profile = upa_weight_profile(sf)
    n_nodes = default_kernel_nodes(sf.alpha_up) if n_nodes is None else n_nodes
    if n_nodes < MIN_NODES:
        raise ValueError(f"need at least {MIN_NODES} nodes, got {n_nodes}")
    x, q = _profile_nodes(profile, n_nodes)
    vals = np.linalg.eigvalsh(_nystrom(sf.norm, x, q * profile(x)))[::-1]
    return KernelSpectrum((sf.alpha_x, sf.alpha_y), np.clip(vals, 0.0, None), len(x))


def sandwich_bounds(sf: SquintFactor, delta: float, ell: int,
                    n_nodes: Optional[int] = None) -> tuple[float, float]:
    """``(delta l3 lambda_ell(B_lo), l3 lambda_ell(B_up))`` bracketing ``lambda_ell(B_alpha)``."""
    if not 0 <= delta <= 1:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    if sf.is_broadside:
        raise ValueError("sandwich bounds undefined at broadside")
    upper = sf.l3 * ula_kernel_spectrum(sf.alpha_up, n_nodes)[ell]
    a_lo = sf.alpha_lo(delta)
    if delta == 0 or a_lo <= 0:
        return 0.0, upper
    lower = delta * sf.l3 * ula_kernel_spectrum(a_lo, n_nodes)[ell]
    return lower, upper


def continuum_spectrum(sf: SquintFactor, planar: bool, n_nodes: Optional[int] = None) -> KernelSpectrum:
    if planar:
        return upa_reduced_spectrum(sf, n_nodes)
    return ula_kernel_spectrum(abs(sf.alpha_x), n_nodes)


def discretization_error(geom: ArrayGeometry, direction: Direction, band: BandSpec,
                         n_nodes: Optional[int] = None) -> float:
    """Normalised squared gap between ``(||alpha||/N) lambda(B)`` and the continuum eigenvalues."""
    sf = squint_factor(geom, direction, band)
    if sf.is_broadside:
        raise ValueError("discretization error undefined at broadside")
    disc = spectrum_dense(correlation_matrix(geom, direction, band)).eigenvalues * sf.norm / geom.n
    planar = not geom.is_ula and sf.alpha_y != 0
    cont = continuum_spectrum(sf, planar, n_nodes).eigenvalues
    size = max(len(disc), len(cont))
    disc = np.pad(disc, (0, size - len(disc)))
    cont = np.pad(cont, (0, size - len(cont)))
    return float(np.sum((disc - cont) ** 2) / np.sum(cont**2))


def sinc2_integral(a: float, b: float) -> float:
    """``int_a^b (sin(pi t) / (pi t))^2 dt`` by adaptive quadrature."""
    # kinks are absent but the integrand oscillates; give quad room for long windows
    limit = max(50, int(4 * abs(b - a)) + 50)
    val, _ = scipy.integrate.quad(lambda t: np.sinc(t) ** 2, a, b, limit=limit,
                                  epsabs=1e-13, epsrel=1e-12)
    return val


def beamspace_limit_gain(alpha: float, n_rf: int) -> float:
    """Dense-array limit of the normalised beamspace gain with ``n_rf`` beams."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if n_rf < 1:
        raise ValueError("need at least one RF chain")
    centers = np.arange(n_rf) - (n_rf - 1) / 2
    total = sum(sinc2_integral(c - alpha / 2, c + alpha / 2) for c in centers)
    return total / alpha
