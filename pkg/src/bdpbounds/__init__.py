"""Certified convergence bounds for time-nonhomogeneous birth-death processes."""

from .bounds import (
    BoundCertificate,
    envelope,
    ergodic_certificate,
    mean_bounds,
    null_ergodic_certificate,
    tail_certificate,
    two_sided_certificate,
    weak_ergodic_certificate,
)
from .errors import BDPError
from .lognorm import coefficient_profile, lognorm_l1, lognorm_of_transformed
from .model import BDPSpec, build_A, build_B, build_transformed, from_tables, preset
from .oracle import cesaro_average, frozen_spectrum, integrate_kolmogorov, weighted_norm
from .rates import LinearRate, RateFunction
from .verify import VerificationReport, check_decay, check_means_and_tails, check_null, check_two_sided
from .weights import (
    WeightSequence,
    f_sequence,
    find_ergodic_weights,
    find_null_weights,
    h_sequence,
    preset_setup,
    preset_weights,
)

__version__ = "0.1.0"
