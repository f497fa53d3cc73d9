"""Beamspace, hybridly/partially-connected, separable and two-sided array gains."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.special

from .channel import inner_product_matrix, steering_vector
from .continuum import sinc2_integral, ula_kernel_spectrum
from .geometry import (SPEED_OF_LIGHT, ArrayGeometry, BandSpec, Direction, SquintFactor,
                       element_positions, squint_factor, _ceil)
from .spectra import (AnalogBeamformer, CorrelationMatrix,
                      RankDeficientError, avg_gain, correlation_matrix, quadrature_correlation)

# two beamspace columns this correlated count as duplicates for the rank guard
_DUPLICATE_CORR = 1 - 1e-10


@dataclass(frozen=True)
class HybridPartition:
    """Grid of ``m_x * m_y`` equal subarrays, each wired to ``chains_per_subarray`` chains."""

    m_x: int
    m_y: int = 1
    chains_per_subarray: int = 1

    def __post_init__(self):
        if self.m_x < 1 or self.m_y < 1 or self.chains_per_subarray < 1:
            raise ValueError("partition counts must be positive")

    @property
    def m(self) -> int:
        return self.m_x * self.m_y

    @property
    def total_chains(self) -> int:
        return self.m * self.chains_per_subarray

    def check(self, geom: ArrayGeometry):
        if geom.n_x % self.m_x or geom.n_y % self.m_y:
            raise ValueError(f"{self.m_x}x{self.m_y} subarrays do not tile a "
                             f"{geom.n_x}x{geom.n_y} array")

    def subarray_geometry(self, geom: ArrayGeometry) -> ArrayGeometry:
        self.check(geom)
        return ArrayGeometry(geom.n_x // self.m_x, geom.n_y // self.m_y, geom.d_x, geom.d_y)

    def element_groups(self, geom: ArrayGeometry) -> list[np.ndarray]:
        """Element indices of each subarray, ordered with the y-block index fastest."""
        self.check(geom)
        sx, sy = geom.n_x // self.m_x, geom.n_y // self.m_y
        ix, iy = np.divmod(np.arange(geom.n), geom.n_y)
        block = (ix // sx) * self.m_y + iy // sy
        return [np.flatnonzero(block == m) for m in range(self.m)]

    def displacements(self, geom: ArrayGeometry) -> np.ndarray:
        """Offset of each subarray's centroid from subarray 0, shape ``(M, 2)``."""
        pos = element_positions(geom)
        centers = np.array([pos[g].mean(axis=0) for g in self.element_groups(geom)])
        return centers - centers[0]


@dataclass(frozen=True)
class MultiGainBounds:
    lower: float
    upper: float


def beamspace_frequencies(sf: SquintFactor, band: BandSpec, n_rf: int, planar: bool) -> np.ndarray:
    """Regular subband centres, spaced ``W/alpha`` (ULA) or ``W/alpha_up`` (planar)."""
    spread = sf.alpha_up if planar else abs(sf.alpha_x)
    if spread == 0:
        raise ValueError("beamspace spacing undefined at broadside")
    return (np.arange(n_rf) - (n_rf - 1) / 2) / spread * band.w


def _rank_guard(geom: ArrayGeometry, direction: Direction, freqs: np.ndarray,
                step: float) -> np.ndarray:
    freqs = freqs.copy()
    for _ in range(len(freqs)):
        g = inner_product_matrix(geom, direction, freqs, freqs).real / geom.n
        dup = np.argwhere(np.triu(np.abs(g) > _DUPLICATE_CORR, k=1))
        if dup.size == 0:
            break
        freqs[dup[0, 1]] += step
    return freqs


def _beamspace_setup(geom, direction, band, n_rf, k_nodes):
    if n_rf < 1:
        raise ValueError("need at least one RF chain")
    if direction.is_broadside:
        raise ValueError("beamspace beamformer undefined at broadside")
    sf = squint_factor(geom, direction, band)
    freqs = beamspace_frequencies(sf, band, n_rf, planar=not geom.is_ula)
    qc = quadrature_correlation(geom, direction, band, k_nodes)
    freqs = _rank_guard(geom, direction, freqs, band.w / len(qc.nodes))
    return freqs, qc


def beamspace_beamformer(geom: ArrayGeometry, direction: Direction, band: BandSpec,
                         n_rf: int, k_nodes: Optional[int] = None) -> AnalogBeamformer:
    """Columns ``a(f_l)``, unnormalised; the gain does not depend on column scale."""
    freqs, _ = _beamspace_setup(geom, direction, band, n_rf, k_nodes)
    cols = [steering_vector(geom, direction, band, f, check_band=False).column() for f in freqs]
    return AnalogBeamformer(np.column_stack(cols), "beamspace")


def beamspace_avg_gain(geom: ArrayGeometry, direction: Direction, band: BandSpec, n_rf: int,
                       k_nodes: Optional[int] = None) -> float:
    """Normalised average gain of the beamspace beamformer, never materialising it.

    With ``W_a = [a(f_l)]`` and quadrature columns ``A = [sqrt(w_k) a(f_k)]`` the
    trace formula becomes ``tr(G^{-1} C C^*)`` with ``G = W_a^* W_a`` and
    ``C = W_a^* A``, both built from closed-form inner products.
    """
    freqs, qc = _beamspace_setup(geom, direction, band, n_rf, k_nodes)
    gram = inner_product_matrix(geom, direction, freqs, freqs).real
    cross = inner_product_matrix(geom, direction, freqs, qc.nodes).real * np.sqrt(qc.weights)
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientError("beamspace columns are not linearly independent") from exc
    x = scipy.linalg.solve_triangular(chol, cross, lower=True)
    return float(np.sum(x**2) / geom.n)


def reduced_band_gain(band_fraction: float) -> float:
    """Normalised gain when each chain keeps ``band_fraction * W / alpha`` of the band."""
    if not band_fraction > 0:
        raise ValueError("band fraction must be positive")
    return 2 * sinc2_integral(0.0, band_fraction / 2)


def _assemble_block_diagonal(geom: ArrayGeometry, part: HybridPartition,
                             blocks: Sequence[np.ndarray]) -> np.ndarray:
    groups = part.element_groups(geom)
    if len(blocks) != len(groups):
        raise ValueError(f"expected {len(groups)} subarray beamformers, got {len(blocks)}")
    widths = [b.shape[1] for b in blocks]
    out = np.zeros((geom.n, sum(widths)), dtype=complex)
    col = 0
    for g, b in zip(groups, blocks):
        if b.shape[0] != len(g):
            raise ValueError("subarray beamformer row count does not match subarray size")
        out[np.ix_(g, np.arange(col, col + b.shape[1]))] = b
        col += b.shape[1]
    return out


def assemble_block_diagonal(geom: ArrayGeometry, part: HybridPartition,
                            blocks: Sequence[np.ndarray]) -> AnalogBeamformer:
    return AnalogBeamformer(_assemble_block_diagonal(geom, part, blocks), "block-diagonal")


def check_block_pattern(geom: ArrayGeometry, part: HybridPartition, w_a: np.ndarray) -> list[np.ndarray]:
    """Split a block-diagonal beamformer into its subarray blocks, validating zeros."""
    groups = part.element_groups(geom)
    owner = np.empty(geom.n, dtype=int)
    for m, g in enumerate(groups):
        owner[g] = m
    col_owner = []
    for j in range(w_a.shape[1]):
        rows = np.flatnonzero(w_a[:, j] != 0)
        owners = set(owner[rows])
        if len(owners) != 1:
            raise ValueError(f"column {j} does not conform to the partition")
        col_owner.append(owners.pop())
    col_owner = np.array(col_owner)
    return [w_a[np.ix_(g, np.flatnonzero(col_owner == m))] for m, g in enumerate(groups)]


def subarray_correlation(b: CorrelationMatrix, rows: np.ndarray) -> CorrelationMatrix:
    return CorrelationMatrix(b.entries[np.ix_(rows, rows)], b.carrier[rows])


def hybrid_partition_gain(geom: ArrayGeometry, direction: Direction, band: BandSpec,
                          part: HybridPartition, subarray_beamformers,
                          b: Optional[CorrelationMatrix] = None) -> float:
    """Sum of per-subarray average gains of a block-diagonal analog network.

    ``subarray_beamformers`` is either one matrix per subarray or an assembled
    block-diagonal :class:`AnalogBeamformer` whose zero pattern is validated.
    """
    if isinstance(subarray_beamformers, AnalogBeamformer):
        blocks = check_block_pattern(geom, part, subarray_beamformers.matrix)
    else:
        blocks = [np.asarray(w) for w in subarray_beamformers]
    groups = part.element_groups(geom)
    if len(blocks) != len(groups):
        raise ValueError(f"expected {len(groups)} subarray beamformers, got {len(blocks)}")
    b = correlation_matrix(geom, direction, band) if b is None else b
    return sum(avg_gain(w, subarray_correlation(b, g)) for w, g in zip(blocks, groups))


def hybridly_required_chains(part: HybridPartition, sf: SquintFactor) -> int:
    """Chains for squint-free hybridly-connected operation: ``ceil(M_y|a_x| + M_x|a_y|)``.

    For a ULA (``alpha_y = 0``, ``M_y = 1``) this is ``ceil(alpha)``, as for a
    fully-connected array.
    """
    return max(1, _ceil(part.m_y * abs(sf.alpha_x) + part.m_x * abs(sf.alpha_y)))


def si(x: float) -> float:
    return float(scipy.special.sici(x)[0])


def partial_mrt_gain(alpha: float, m: float) -> float:
    """Dense-limit normalised gain of M identical MRT subarrays (closed form with Si)."""
    if not alpha > 0 or not m > 0:
        raise ValueError("alpha and m must be positive")
    x = math.pi * alpha / m
    h = x / 2
    return 2 / x * (si(x) - math.sin(h) ** 2 / h)


def partial_optimal_gain(alpha: float, m: float, n_nodes: Optional[int] = None) -> float:
    """Dense-limit normalised gain of M identical subarrays with eigen-optimal weights."""
    if not alpha > 0 or not m > 0:
        raise ValueError("alpha and m must be positive")
    per = alpha / m
    return ula_kernel_spectrum(per, n_nodes)[0] / per


def delay_line_weights(geom: ArrayGeometry, part: HybridPartition, direction: Direction,
                       band: BandSpec, f_rel: float) -> np.ndarray:
    """Per-subarray unit-modulus phases that turn M identical subarrays into one coherent aperture."""
    if part.chains_per_subarray != 1:
        raise ValueError("delay-line equivalence needs identical single-chain subarrays")
    if not band.contains(f_rel):
        raise ValueError("relative frequency outside the band")
    disp = part.displacements(geom) @ direction.as_array()
    return np.exp(-2j * np.pi * (band.f_c + f_rel) / SPEED_OF_LIGHT * disp)


def separable_gain_bound(gx_norm: float, gy_norm: float) -> float:
    _check_unit(gx_norm, gy_norm)
    return min(gx_norm, gy_norm)


def multi_gain_bounds(gt_norm: float, gr_norm: float) -> MultiGainBounds:
    _check_unit(gt_norm, gr_norm)
    return MultiGainBounds(max(gt_norm + gr_norm - 1, 0.0), min(gt_norm, gr_norm))


def _check_unit(*vals: float):
    for v in vals:
        if not 0 <= v <= 1:
            raise ValueError(f"normalised gain {v} outside [0, 1]")
