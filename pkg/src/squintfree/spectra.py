"""Bandwidth-averaged correlation matrix, its spectrum and the gains of analog beamformers.

Two routes to the spectrum are provided.  The dense route materialises the
N x N sinc matrix and is capped in size.  The Gram route replaces the
frequency average by Gauss-Legendre quadrature, ``B ~ sum_k w_k a(f_k) a*(f_k)``,
and diagonalises the K x K weighted Gram matrix whose entries come from the
closed-form steering inner products; it scales to arrays of any size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.linalg

from .channel import SteeringVector, inner_product_matrix, steering_vector
from .geometry import (SPEED_OF_LIGHT, ArrayGeometry, BandSpec, Direction, element_positions,
                       squint_factor, _ceil)

DENSE_CAP = 4096
ARCHITECTURES = ("full", "beamspace", "block-diagonal")


class MatrixTooLargeError(ValueError):
    """Raised when a dense N x N matrix is requested beyond the configured cap."""


class RankDeficientError(ValueError):
    pass


class NumericalError(RuntimeError):
    """Eigensolver or linear-algebra failure."""


@dataclass(frozen=True)
class CorrelationMatrix:
    """``B = (1/W) int a(f) a*(f) df``, stored as its carrier-free sinc core.

    ``entries`` is the real sinc matrix; ``carrier`` holds ``a(0)`` so that the
    full matrix is ``diag(carrier) @ entries @ diag(carrier)^*``.  Both share
    the same eigenvalues.
    """

    entries: np.ndarray
    carrier: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self.carrier[:, None] * self.entries * self.carrier.conj()[None, :]


@dataclass(frozen=True)
class QuadratureCorrelation:
    """Gram-equivalent of ``B``: ``sum_k weights[k] a(nodes[k]) a*(nodes[k])``."""

    geom: ArrayGeometry
    direction: Direction
    band: BandSpec
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.geom.n

    def gram(self) -> np.ndarray:
        """K x K matrix ``sqrt(w_k w_l) a*(f_k) a(f_l)``; real for centered arrays."""
        g = inner_product_matrix(self.geom, self.direction, self.nodes, self.nodes).real
        s = np.sqrt(self.weights)
        return s[:, None] * g * s[None, :]

    def steering_matrix(self) -> np.ndarray:
        """N x K matrix with columns ``sqrt(w_k) a(f_k)``."""
        cols = [steering_vector(self.geom, self.direction, self.band, f, check_band=False).column()
                for f in self.nodes]
        return np.column_stack(cols) * np.sqrt(self.weights)[None, :]


@dataclass
class SpectrumResult:
    """Nonincreasing eigenvalues of ``B``, optionally with unit-norm eigenvectors.

    Gram-route results keep the factorisation in ``source`` and ``gram_vectors``
    so eigenvector columns can be rebuilt on demand with :meth:`vectors`.
    """

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None
    source: Optional[QuadratureCorrelation] = field(default=None, repr=False)
    gram_vectors: Optional[np.ndarray] = field(default=None, repr=False)

    def partial_sum(self, n_rf: int) -> float:
        return float(np.sum(self.eigenvalues[:n_rf]))

    def vectors(self, count: Optional[int] = None) -> np.ndarray:
        count = len(self.eigenvalues) if count is None else count
        if self.eigenvectors is not None:
            if count > self.eigenvectors.shape[1]:
                raise ValueError(f"only {self.eigenvectors.shape[1]} eigenvectors available")
            return self.eigenvectors[:, :count]
        if self.source is None or self.gram_vectors is None:
            raise ValueError("spectrum was computed without eigenvectors")
        if count > self.gram_vectors.shape[1]:
            raise ValueError(f"only {self.gram_vectors.shape[1]} eigenvectors available")
        lam = self.eigenvalues[:count]
        if np.any(lam <= 0):
            raise ValueError("cannot rebuild eigenvectors of zero eigenvalues")
        a = self.source.steering_matrix()
        return a @ self.gram_vectors[:, :count] / np.sqrt(lam)[None, :]


@dataclass(frozen=True)
class AnalogBeamformer:
    matrix: np.ndarray
    architecture: str = "full"

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if self.matrix.ndim != 2:
            raise ValueError("analog beamformer must be an N x N_RF matrix")

    @property
    def n_rf(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class GainProfile:
    grid: np.ndarray
    g: np.ndarray
    g_avg: float


def default_nodes(geom: ArrayGeometry, direction: Direction, band: BandSpec) -> int:
    """``max(64, 8 ceil(alpha_up))``: B has effective rank close to alpha_up."""
    sf = squint_factor(geom, direction, band)
    return max(64, 8 * _ceil(sf.alpha_up))


def correlation_matrix(geom: ArrayGeometry, direction: Direction, band: BandSpec,
                       cap: int = DENSE_CAP) -> CorrelationMatrix:
    if geom.n > cap:
        raise MatrixTooLargeError(
            f"N = {geom.n} exceeds the dense cap {cap}; use spectrum_gram instead")
    proj = element_positions(geom) @ direction.as_array()
    diff = proj[None, :] - proj[:, None]  # entry (n', n) uses u.(r_n - r_n')
    entries = np.sinc(band.w * diff / SPEED_OF_LIGHT)
    carrier = np.exp(-2j * np.pi * band.f_c / SPEED_OF_LIGHT * proj)
    return CorrelationMatrix(entries, carrier)


def _sorted_eigh(mat: np.ndarray, want_vectors: bool):
    try:
        if want_vectors:
            vals, vecs = scipy.linalg.eigh(mat)
        else:
            vals, vecs = scipy.linalg.eigvalsh(mat), None
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    order = np.argsort(vals)[::-1]
    vals = np.clip(vals[order], 0.0, None)
    if vecs is not None:
        vecs = vecs[:, order]
    return vals, vecs


def spectrum_dense(b: CorrelationMatrix, want_vectors: bool = False) -> SpectrumResult:
    vals, vecs = _sorted_eigh(b.entries, want_vectors)
    if vecs is not None:
        # eigenvectors of the sinc core map to those of the full B through the carrier phases
        vecs = b.carrier[:, None] * vecs
    return SpectrumResult(vals, vecs)


def quadrature_correlation(geom: ArrayGeometry, direction: Direction, band: BandSpec,
                           k_nodes: Optional[int] = None) -> QuadratureCorrelation:
    if k_nodes is None:
        k_nodes = default_nodes(geom, direction, band)
    nodes, weights = band.quadrature(k_nodes)
    return QuadratureCorrelation(geom, direction, band, nodes, weights)


def spectrum_gram(geom: ArrayGeometry, direction: Direction, band: BandSpec,
                  k_nodes: Optional[int] = None) -> SpectrumResult:
    """Top ``min(k_nodes, N)`` eigenvalues of the quadrature approximation of B."""
    if k_nodes is not None and k_nodes < 2:
        raise ValueError("k_nodes must be at least 2")
    qc = quadrature_correlation(geom, direction, band, k_nodes)
    vals, vecs = _sorted_eigh(qc.gram(), True)
    keep = min(len(vals), geom.n)
    return SpectrumResult(vals[:keep], None, qc, vecs[:, :keep])


def optimal_analog_beamformer(spec: SpectrumResult, n_rf: int) -> AnalogBeamformer:
    """Top ``n_rf`` eigenvectors of B, the maximiser of the average gain."""
    if n_rf < 1:
        raise ValueError("need at least one RF chain")
    return AnalogBeamformer(spec.vectors(n_rf), "full")


def _orthonormal_basis(w: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    q, r = np.linalg.qr(w)
    d = np.abs(np.diag(r))
    if d.size == 0 or d.min() <= rtol * max(d.max(), np.finfo(float).tiny):
        raise RankDeficientError("analog beamformer is not full column rank")
    return q


def _as_matrix(w_a) -> np.ndarray:
    return w_a.matrix if isinstance(w_a, AnalogBeamformer) else np.asarray(w_a)


def avg_gain(w_a, b: Union[CorrelationMatrix, QuadratureCorrelation]) -> float:
    """``tr(W (W^* W)^{-1} W^* B)``; unchanged by any invertible right factor on W."""
    q = _orthonormal_basis(_as_matrix(w_a))
    if isinstance(b, CorrelationMatrix):
        return float(np.real(np.einsum("ik,ij,jk->", q.conj(), b.matrix, q)))
    proj = q.conj().T @ b.steering_matrix()
    return float(np.sum(np.abs(proj) ** 2))


def instantaneous_gain(w_a, a_f: SteeringVector) -> tuple[float, np.ndarray]:
    """Best gain at one frequency and the digital weights attaining it.

    The weights are scaled so that ``||W_a w_d|| = 1``.
    """
    w = _as_matrix(w_a)
    _orthonormal_basis(w)
    z = w.conj().T @ a_f.column()
    gram = w.conj().T @ w
    try:
        w_d = scipy.linalg.solve(gram, z, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise RankDeficientError(str(exc)) from exc
    g = float(np.real(np.vdot(z, w_d)))
    w_d = w_d / np.linalg.norm(w @ w_d)
    return g, w_d


def beamforming_gain(w_a, w_d: np.ndarray, a_f: SteeringVector) -> float:
    """``|a*(f) W_a w_d|^2 / ||W_a w_d||^2`` for explicit digital weights."""
    v = _as_matrix(w_a) @ w_d
    return float(abs(a_f.entries @ v) ** 2 / np.vdot(v, v).real)


def gain_profile(w_a, geom: ArrayGeometry, direction: Direction, band: BandSpec,
                 k_nodes: int = 64) -> GainProfile:
    """Per-frequency optimal gains on the quadrature grid and their average."""
    nodes, weights = band.quadrature(k_nodes)
    g = np.array([instantaneous_gain(w_a, steering_vector(geom, direction, band, f))[0]
                  for f in nodes])
    return GainProfile(nodes, g, float(weights @ g))

