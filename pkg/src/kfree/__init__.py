"""Exact and certified computations for k-free numbers in short intervals and progressions."""

__version__ = "0.1.0"

from ._core import BACKEND
from .errors import BudgetError, CapacityError, DomainError, KfreeError, PrecisionError
from .euler import EulerProductValue, euler_product, euler_product_direct
from .fourier import (
    AdmissibleFraction,
    ZValue,
    admissible_fractions,
    constrained_phase_sum,
    constrained_window_sum,
    fourier_weight,
    geometric_sum,
    moment_constant_fourier,
    window_sum_bound_check,
)
from .moments import (
    MomentReport,
    PowerSums,
    ap_counts,
    ap_moment,
    binomial_identity_check,
    lattice_average_check,
    progression_identity_check,
    shift_interval,
    short_moment,
    window_counts,
)
from .sieve import KfreeWindow, SieveConfig, count_kfree, is_kfree, sieve_range, sigma_kernel, xi_value
from .singular import (
    SeriesTable,
    ShiftTuple,
    averaged_box_sum,
    coprime_density,
    local_residue_count,
    moment_constant_binomial,
    shift_box_sum,
    singular_series,
    zeta_inverse,
)
from .tuples import (
    TupleCountReport,
    count_divisible,
    count_kfree_tuples,
    count_power_divisor_tuples,
    moebius_split,
    residue_solution_count,
    tuple_count_residual,
)
