import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, strategies as st

from squintfree.architectures import (HybridPartition, _rank_guard, assemble_block_diagonal,
                                      beamspace_avg_gain, beamspace_beamformer,
                                      beamspace_frequencies, check_block_pattern,
                                      delay_line_weights, hybrid_partition_gain,
                                      hybridly_required_chains, multi_gain_bounds,
                                      partial_mrt_gain, partial_optimal_gain, reduced_band_gain,
                                      separable_gain_bound, si)
from squintfree.channel import inner_product_matrix, steering_vector
from squintfree.continuum import beamspace_limit_gain, ula_kernel_spectrum
from squintfree.geometry import (SPEED_OF_LIGHT, ArrayGeometry, BandSpec, Direction,
                                 SquintFactor, squint_factor, uv_from_angles)
from squintfree.spectra import (AnalogBeamformer, avg_gain, beamforming_gain, correlation_matrix,
                                optimal_analog_beamformer, spectrum_dense, spectrum_gram)

BAND = BandSpec(300e9, 30e9)


def ula(n, alpha):
    geom = ArrayGeometry.half_wavelength(n, 1, 300e9)
    return geom, Direction(1.0), BandSpec(300e9, alpha * SPEED_OF_LIGHT / geom.l_x)


def db(x):
    return 10 * math.log10(x)


# ------------------------------------------------------------------ partition

def test_partition_basics():
    part = HybridPartition(2, 4, 3)
    assert part.m == 8 and part.total_chains == 24
    geom = ArrayGeometry(8, 8)
    assert part.subarray_geometry(geom) == ArrayGeometry(4, 2)
    groups = part.element_groups(geom)
    assert sorted(np.concatenate(groups)) == list(range(64))
    assert all(len(g) == 8 for g in groups)
    with pytest.raises(ValueError):
        HybridPartition(3).check(geom)
    with pytest.raises(ValueError):
        HybridPartition(0)


def test_displacements_are_centroid_offsets():
    geom = ArrayGeometry(8, 1, 0.5, 0.5)
    disp = HybridPartition(4).displacements(geom)
    np.testing.assert_allclose(disp[:, 0], [0, 1, 2, 3])
    np.testing.assert_allclose(disp[:, 1], 0)


# ------------------------------------------------------------------ beamspace

def test_beamspace_frequencies():
    sf = SquintFactor(4.0, 0.0)
    np.testing.assert_allclose(beamspace_frequencies(sf, BAND, 4, False),
                               np.array([-1.5, -0.5, 0.5, 1.5]) * BAND.w / 4)
    np.testing.assert_allclose(beamspace_frequencies(SquintFactor(3.0, -1.0), BAND, 2, True),
                               np.array([-0.5, 0.5]) * BAND.w / 4)
    with pytest.raises(ValueError):
        beamspace_frequencies(SquintFactor(0.0, 0.0), BAND, 2, True)


def test_single_beam_is_mrt():
    geom, u, band = ula(32, 2.0)
    w = beamspace_beamformer(geom, u, band, 1)
    np.testing.assert_allclose(w.matrix[:, 0], steering_vector(geom, u, band).column())
    assert w.architecture == "beamspace"


def test_beamspace_rejects_broadside_and_zero_chains():
    with pytest.raises(ValueError):
        beamspace_avg_gain(ArrayGeometry(4), Direction(0.0), BAND, 2)
    with pytest.raises(ValueError):
        beamspace_avg_gain(ArrayGeometry(4), Direction(0.5), BAND, 0)


def test_beamspace_columns_nearly_orthonormal():
    geom, u, band = ula(1024, 8.0)
    freqs = beamspace_frequencies(squint_factor(geom, u, band), band, 8, planar=False)
    gram = inner_product_matrix(geom, u, freqs, freqs).real / geom.n
    off = gram - np.diag(np.diag(gram))
    assert np.abs(off).max() < 0.02
    np.testing.assert_allclose(np.diag(gram), 1.0)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
def test_beamspace_matches_continuum_limit(p):
    geom, u, band = ula(1024, 8.0)
    k = math.ceil(p * 8)
    assert beamspace_avg_gain(geom, u, band, k) == pytest.approx(beamspace_limit_gain(8.0, k),
                                                                 abs=0.03)


def test_beamspace_trace_formula_matches_materialised(upa_small, oblique):
    w = beamspace_beamformer(upa_small, oblique, BAND, 4)
    direct = avg_gain(w, correlation_matrix(upa_small, oblique, BAND)) / upa_small.n
    assert beamspace_avg_gain(upa_small, oblique, BAND, 4) == pytest.approx(direct, rel=1e-9)


@given(st.lists(st.floats(1e-3, 1e3), min_size=5, max_size=5))
def test_beamspace_column_scale_invariance(scales):
    geom = ArrayGeometry.half_wavelength(8, 6, 300e9)
    u = uv_from_angles(25, 70)
    band = BandSpec(300e9, 120e9)
    w = beamspace_beamformer(geom, u, band, 5).matrix
    b = correlation_matrix(geom, u, band)
    assert avg_gain(w * np.array(scales), b) == pytest.approx(avg_gain(w, b), rel=1e-10)


@given(st.floats(0, 360), st.floats(15, 90), st.floats(20e9, 300e9), st.integers(1, 8))
def test_beamspace_never_beats_optimal(theta, phi, w, n_rf):
    geom = ArrayGeometry.half_wavelength(12, 10, 300e9)
    u = uv_from_angles(theta, phi)
    band = BandSpec(300e9, w)
    opt = spectrum_gram(geom, u, band).partial_sum(n_rf) / geom.n
    assert beamspace_avg_gain(geom, u, band, n_rf) <= opt + 1e-9


def test_near_broadside_beamspace_is_lossless():
    geom = ArrayGeometry.half_wavelength(64, 64, 300e9)
    assert beamspace_avg_gain(geom, uv_from_angles(10, 0.01), BAND, 1) == pytest.approx(1, abs=1e-6)


def test_rank_guard_separates_duplicate_beams():
    geom = ArrayGeometry.half_wavelength(16, 1, 300e9)
    u = Direction(0.5)
    freqs = _rank_guard(geom, u, np.array([0.0, 0.0, 2e9]), 1e8)
    assert freqs[0] != freqs[1]
    gram = inner_product_matrix(geom, u, freqs, freqs).real
    assert np.linalg.eigvalsh(gram).min() > 1e-8


def test_tiny_squint_beamspace_is_finite():
    geom = ArrayGeometry.half_wavelength(16, 1, 300e9)
    band = BandSpec(300e9, 1e9)
    g = beamspace_avg_gain(geom, Direction(0.2), band, 6)
    assert 0 < g <= spectrum_gram(geom, Direction(0.2), band).partial_sum(6) / geom.n + 1e-9


def test_reduced_band_gain():
    assert reduced_band_gain(2) == pytest.approx(0.902, abs=1e-3)
    assert db(reduced_band_gain(2)) == pytest.approx(-0.45, abs=0.01)
    assert -db(reduced_band_gain(4)) == pytest.approx(0.22, abs=0.01)
    assert reduced_band_gain(400) == pytest.approx(1.0, abs=2e-3)
    with pytest.raises(ValueError):
        reduced_band_gain(0)


# ------------------------------------------------------------ hybridly connected

def test_single_partition_reduces_to_full(upa_small, oblique):
    b = correlation_matrix(upa_small, oblique, BAND)
    w = optimal_analog_beamformer(spectrum_dense(b, want_vectors=True), 3).matrix
    assert hybrid_partition_gain(upa_small, oblique, BAND, HybridPartition(1, 1, 3), [w]) == \
        pytest.approx(avg_gain(w, b), rel=1e-12)


@given(st.integers(0, 10**6))
def test_decomposition_matches_assembled(seed):
    rng = np.random.default_rng(seed)
    geom = ArrayGeometry.half_wavelength(16, 16, 300e9)
    u = uv_from_angles(rng.uniform(0, 360), rng.uniform(10, 90))
    part = HybridPartition(2, 2, 2)
    blocks = [rng.standard_normal((64, 2)) + 1j * rng.standard_normal((64, 2)) for _ in range(4)]
    assembled = assemble_block_diagonal(geom, part, blocks)
    b = correlation_matrix(geom, u, BAND)
    split = hybrid_partition_gain(geom, u, BAND, part, blocks, b)
    assert split == pytest.approx(avg_gain(assembled, b), rel=1e-10)
    assert hybrid_partition_gain(geom, u, BAND, part, assembled, b) == pytest.approx(split, rel=1e-12)


def test_block_pattern_validation():
    geom = ArrayGeometry(4, 4)
    part = HybridPartition(2, 2)
    w = assemble_block_diagonal(geom, part, [np.ones((4, 1))] * 4).matrix
    assert [blk.shape for blk in check_block_pattern(geom, part, w)] == [(4, 1)] * 4
    w[0, 3] = 1.0
    with pytest.raises(ValueError, match="conform"):
        check_block_pattern(geom, part, w)
    with pytest.raises(ValueError):
        assemble_block_diagonal(geom, part, [np.ones((4, 1))] * 3)


def test_hybrid_ula_with_per_subarray_optimal():
    geom, u, band = ula(256, 32.0)
    part = HybridPartition(4, 1, 8)
    sub = part.subarray_geometry(geom)
    assert squint_factor(sub, u, band).alpha_x == pytest.approx(8.0)
    w = optimal_analog_beamformer(spectrum_dense(correlation_matrix(sub, u, band), True), 8).matrix
    g = hybrid_partition_gain(geom, u, band, part, [w] * 4) / geom.n
    assert g >= 0.95
    full = spectrum_dense(correlation_matrix(geom, u, band)).partial_sum(32) / geom.n
    assert g < full


def test_hybridly_required_chains():
    sf = SquintFactor(3.0, 4.0)
    assert hybridly_required_chains(HybridPartition(2, 2), sf) == 14
    assert hybridly_required_chains(HybridPartition(1, 1), sf) == 7
    for m in (1, 2, 8):
        assert hybridly_required_chains(HybridPartition(m), SquintFactor(5.3, 0.0)) == 6


# ---------------------------------------------------------- partially connected

def test_partial_mrt_losses():
    alpha = 6.0
    for mult, loss in ((1, -1.11), (2, -0.29), (3, -0.13)):
        assert db(partial_mrt_gain(alpha, mult * alpha)) == pytest.approx(loss, abs=0.01)
    assert partial_mrt_gain(5.0, 5.0) == pytest.approx(0.7737, abs=1e-4)


def _partial_mrt_quadrature(alpha, m):
    # (1/W) int F-limit df: average over t in [-1/2, 1/2] of sinc^2(alpha t / m)
    val, _ = scipy.integrate.quad(lambda t: np.sinc(alpha * t / m) ** 2, -0.5, 0.5,
                                  epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


@given(st.floats(0.1, 50), st.floats(1, 64))
def test_partial_mrt_closed_form_vs_quadrature(alpha, m):
    assert partial_mrt_gain(alpha, m) == pytest.approx(_partial_mrt_quadrature(alpha, m), abs=1e-8)


def test_si_against_quadrature():
    for x in (1e-3, 0.5, 3.0, 40.0):
        val, _ = scipy.integrate.quad(lambda t: np.sinc(t / np.pi), 0, x, limit=200,
                                      epsabs=1e-14, epsrel=1e-13)
        assert si(x) == pytest.approx(val, abs=1e-12)


def test_partial_optimal_gain():
    assert partial_optimal_gain(4.0, 4) == pytest.approx(ula_kernel_spectrum(1.0)[0], rel=1e-12)
    assert partial_optimal_gain(1e-3, 1) == pytest.approx(1.0, abs=1e-6)
    for alpha in (1.0, 4.0, 16.0):
        for m in (1, 2, 4, 16):
            assert partial_optimal_gain(alpha, m) >= partial_mrt_gain(alpha, m) - 1e-12
    with pytest.raises(ValueError):
        partial_optimal_gain(0.0, 2)


def test_partial_mrt_matches_finite_array():
    # dense limit: large subarrays with MRT weights at the carrier
    geom, u, band = ula(2048, 8.0)
    part = HybridPartition(8)
    sub = part.subarray_geometry(geom)
    w = steering_vector(sub, u, band).column()[:, None]
    g = hybrid_partition_gain(geom, u, band, part, [w] * 8) / geom.n
    assert g == pytest.approx(partial_mrt_gain(8.0, 8), abs=1e-3)


# ------------------------------------------------------------------ delay lines

@pytest.mark.parametrize("m", [1, 4])
def test_delay_line_identity(m):
    geom = ArrayGeometry.half_wavelength(32, 1, 300e9)
    u = Direction(0.8)
    part = HybridPartition(m)
    sub = part.subarray_geometry(geom)
    rng = np.random.default_rng(7)
    w_a = steering_vector(sub, u, BAND).column()
    w_full = assemble_block_diagonal(geom, part, [w_a[:, None]] * m)
    for f in rng.uniform(-BAND.w / 2, BAND.w / 2, 20):
        w_d = delay_line_weights(geom, part, u, BAND, f)
        assert np.allclose(np.abs(w_d), 1.0)
        g = beamforming_gain(w_full, w_d, steering_vector(geom, u, BAND, f))
        g0 = beamforming_gain(AnalogBeamformer(w_a[:, None]), np.ones(1),
                              steering_vector(sub, u, BAND, f))
        assert g == pytest.approx(m * g0, rel=1e-10)


def test_delay_line_phases_align_at_broadside():
    geom = ArrayGeometry(16, 1, 0.001)
    w_d = delay_line_weights(geom, HybridPartition(4), Direction(0.0), BAND, 3e9)
    assert abs(w_d.sum()) == pytest.approx(4.0)


def test_delay_line_preconditions():
    geom = ArrayGeometry(16)
    with pytest.raises(ValueError):
        delay_line_weights(geom, HybridPartition(4, 1, 2), Direction(0.3), BAND, 0.0)
    with pytest.raises(ValueError):
        delay_line_weights(geom, HybridPartition(4), Direction(0.3), BAND, 20e9)


# -------------------------------------------------------- product-gain bounds

def test_bound_arithmetic():
    assert separable_gain_bound(1, 1) == 1
    assert separable_gain_bound(0.9, 0.8) == 0.8
    b = multi_gain_bounds(0.6, 0.3)
    assert (b.lower, b.upper) == (0.0, 0.3)
    b = multi_gain_bounds(1, 1)
    assert (b.lower, b.upper) == (1, 1)
    with pytest.raises(ValueError):
        multi_gain_bounds(1.2, 0.5)
    with pytest.raises(ValueError):
        separable_gain_bound(-0.1, 0.5)


def test_bounds_hold_for_random_profiles():
    rng = np.random.default_rng(2024)
    grid = 64
    for _ in range(10_000):
        gt = rng.uniform(0, 1, grid) ** rng.uniform(0.2, 5)
        gr = rng.uniform(0, 1, grid) ** rng.uniform(0.2, 5)
        prod = np.mean(gt * gr)
        b = multi_gain_bounds(gt.mean(), gr.mean())
        assert b.lower - 1e-12 <= prod <= b.upper + 1e-12
        assert prod <= separable_gain_bound(gt.mean(), gr.mean()) + 1e-12


@given(st.integers(0, 200), st.integers(0, 200))
def test_bounds_are_attained_by_indicators(kt, kr):
    grid = 200
    t = np.arange(grid)
    gt = (t < kt).astype(float)
    gr_same = (t < kr).astype(float)
    gr_flip = (t >= grid - kr).astype(float)
    b = multi_gain_bounds(gt.mean(), gr_same.mean())
    assert np.mean(gt * gr_same) == pytest.approx(b.upper, abs=1e-12)
    assert np.mean(gt * gr_flip) == pytest.approx(b.lower, abs=1e-12)
