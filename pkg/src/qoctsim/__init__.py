"""Forward simulation and analysis of quantum-optical and classical OCT."""

from .analysis import (ComparisonReport, Feature, FeatureReport, compare_scans, extract_features,
                       oct_envelope, resolution_ratio)
from .engine import (Interferogram, add_counting_noise, lambda0, lambda_tau, oct_scan, qoct_scan,
                     scan_delays, shifted_reference, two_surface_oracle)
from .errors import ConfigError, NumericalError, QoctError
from .sample import (ConstantIndex, Interface, Layer, MediumSegment, OpticalStack, TabulatedDispersion,
                     TaylorDispersion, TransferFunction, beta, mirror, round_trip_phase, slab,
                     transfer_function)
from .spectrum import (SpectralDensity, coherence_length, default_grid, evaluate_spectrum,
                       fourier_envelope, make_spectrum)

__version__ = "0.1.0"
