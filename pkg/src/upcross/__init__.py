"""Upcrossing counts, cumulative sums and effective covers for Birkhoff averages
on the binary shift."""
from .cover import CylinderCover, cover_measure, enumerate_bad_cylinders, verify_uniform_bound
from .cumsum import (
    CumSumResult,
    IntervalFamily,
    cumsum_upper_bound,
    cumulative_sum,
    cumulative_sum_bruteforce,
    potential_step,
    upcrossings_vs_family_size,
)
from .lemma import DEFAULT_C, WindowReport, estimate_constant, window_average
from .measures import bernoulli, check_axioms, markov, mixture
from .orbit import (
    Observable,
    birkhoff_averages,
    exact_expected_upcrossings,
    monte_carlo_expected_upcrossings,
    shift_invariance_of_expectation,
)
from .oscillation import (
    BinaryString,
    adversarial_string,
    factor_average_oscillation,
    oscillation_number,
)
from .sequences import (
    BoundedSequence,
    Gap,
    UpcrossingResult,
    count_downcrossings,
    count_upcrossings,
    partial_sums,
    running_averages,
)

__version__ = "0.1.0"
