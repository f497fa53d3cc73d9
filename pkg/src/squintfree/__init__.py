"""Beam squint and RF-chain budgeting for wideband hybrid arrays."""

from .geometry import (SPEED_OF_LIGHT, ArrayGeometry, BandSpec, Direction, SquintFactor,
                       element_positions, required_rf_chains, squint_factor, uv_from_angles)
from .channel import LinkBudget, SteeringVector, snr, steering_inner_product, steering_vector
from .spectra import (AnalogBeamformer, CorrelationMatrix, SpectrumResult, avg_gain,
                      correlation_matrix, instantaneous_gain, optimal_analog_beamformer,
                      spectrum_dense, spectrum_gram)
from .continuum import (KernelSpectrum, WeightProfile, beamspace_limit_gain, discretization_error,
                        polarization_count, sandwich_bounds, ula_kernel_spectrum,
                        upa_reduced_spectrum, upa_weight_profile)
from .squint import alpha_3db, beam_pattern, dirichlet_gain, mrt_gain_ula
from .architectures import (HybridPartition, MultiGainBounds, beamspace_avg_gain,
                            beamspace_beamformer, delay_line_weights, hybrid_partition_gain,
                            hybridly_required_chains, multi_gain_bounds, partial_mrt_gain,
                            partial_optimal_gain, reduced_band_gain, separable_gain_bound)

__version__ = "0.1.0"
