"""Feedback stability and coverage analysis for swarms of wireless repeaters."""

__version__ = "0.1.0"

from .channel import ChannelModel, FreeSpaceLOS
from .coverage import achieved_extension, coverage_curve, destination_distances, required_gain
from .deployment import (Deployment, distance_matrix, make_custom, make_grid, make_multicell,
                         make_pair, make_ring, make_ring_even)
from .echo_sim import EchoConfig, echo_peaks, impulse_train_coefficients, simulate_pair
from .errors import (BracketError, ConfigurationError, DegenerateDeploymentError, DimensionError,
                     InvalidInputError, RepeaterError, StructureError)
from .numerics import bisect, dft, idft, lu_det
from .stability import (FrequencyGrid, StabilityReport, build_h, circulant_eigenvalues,
                        estimate_alpha_max, gershgorin_bound, measure_curve, stability_measure_circulant,
                        stability_measure_det)
