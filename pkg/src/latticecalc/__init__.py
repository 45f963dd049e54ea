"""Discrete heat and Poisson semigroups, fractional operators and Hölder-type regularity on the integers.

The numerical core (scaled Bessel rows, heat-kernel differences, partial
convolution sums) runs on a compiled extension when it is built and on a
pure-Python fallback otherwise; ``BACKEND`` names the active one and
``LATTICECALC_PURE=1`` forces the fallback.

The kernel modules are reached as ``latticecalc.heat_kernel`` and
``latticecalc.poisson_kernel``; their point evaluators keep those names
inside the modules.
"""

from . import bessel_core, heat_kernel, lattice_fn, operators, poisson_kernel, regularity

from ._backend import NAME as BACKEND
from .bessel_core import (
    asymptotic_scaled,
    bessel_fourier_check,
    bessel_i_scaled,
    bessel_row,
    int_fract_bessel_check,
    moment_polynomial,
    moment_sum,
    moment_value,
    q_coeffs,
)
from .errors import (
    AccuracyError,
    CapacityError,
    ContractError,
    DegenerateFitError,
    DomainError,
    LatticeCalcError,
)
from .heat_kernel import (
    domination_ratios,
    heat_diff,
    heat_diff_table,
    heat_l1_diff_norm,
    heat_table,
    heat_tderiv,
)
from .kernel_table import KernelTable
from .lattice_fn import (
    LatticeFunction,
    abs_pow,
    constant,
    damped_pow,
    delta,
    differenced,
    discrete_laplacian,
    from_csv,
    from_table,
    growth_certificate,
    linear,
    mixed_diff,
    parse_function,
    rademacher,
    snapshot,
    truncated,
    unit_impulse,
    weighted_norm,
    zygmund_w,
)
from .operators import (
    ApplyResult,
    FracKernel,
    Symbol,
    bessel_potential,
    bessel_potential_kernel,
    bessel_potential_table,
    frac_kernel_neg,
    frac_kernel_pos,
    frac_kernel_table,
    frac_laplacian_neg,
    frac_laplacian_pos,
    frac_laplacian_pos_semigroup,
    heat_apply,
    heat_tderiv_apply,
    poisson_apply,
    poisson_yderiv_apply,
    spectral_oracle,
)
from .poisson_kernel import (
    poisson_l1_norm,
    poisson_table,
    poisson_y_deriv,
)
from .regularity import (
    DecayFitReport,
    SeminormReport,
    characterize,
    heat_exponent_fit,
    holder_seminorm,
    pointwise_exponent,
    poisson_exponent_fit,
    regularity_shift_experiment,
    verify_lemma_suite,
    zygmund_seminorm,
)

__version__ = "0.1.0"
