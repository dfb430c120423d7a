"""Limit-cycle analysis for an ideal relay around a second-order plant.

The loop is ``dx/dt = A x - B sign(x2)`` with the plant
``(-kappa s + gamma) / (s^2 + a1 s + a2)``.  The package provides the
closed-form half return map of the loop, a contraction-based certificate
of its behaviour, and an independent RK4/Filippov simulator.
"""

from .cycle import (Classification, IterationTrace, LimitCycleCertificate,
                    certify, contraction_bound, iterate_half_map,
                    kappa_shift_check, self_mapping_threshold)
from .errors import (BelowSwitchOnset, MaxIterExceeded, NoConvergence,
                     NoCrossings, NonMonicDenominator, NonPositiveGain,
                     NoSlidingSegment, NotContractive, NotHurwitz,
                     NumericalError, OutsideSlidingSegment, PlantError,
                     RelayCycleError, UnsupportedPoleClass)
from .filippov import (Event, SimConfig, SimTrace, simulate,
                       sliding_dynamics, switching_sequence)
from .flow import critical_time, flow_from, flow_positive, matrix_exp
from .plant import (ComplexConjugate, DistinctReal, NegativeZero,
                    NoFiniteZero, PlantSpec, PositiveZero, RepeatedReal,
                    classify_poles, classify_zero, plant_from_json, realize,
                    sink_point, validate_plant)
from .switching import (ExitResult, exit_plus, f_minus, f_plus, f_plus_prime,
                        f_plus_second, psi_minus, psi_plus, tau_minus,
                        tau_plus, tau_plus_prime)

__version__ = "0.1.0"
