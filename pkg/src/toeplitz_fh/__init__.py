"""Toeplitz matrices with Fisher-Hartwig symbols: inversion, extreme eigenvalues and kernel limits."""

from .core import (
    LevinsonBreakdown,
    PredictorPoly,
    ToeplitzSystem,
    build_toeplitz,
    gs_inverse_entry,
    gs_inverse_matrix,
    levinson_predictor,
    matvec,
    orthogonal_poly,
    toeplitz_solve,
)
from .kernels import (
    KernelBounds,
    NystromKernel,
    closed_form_bounds,
    eval_G_alpha,
    eval_h_alpha,
    iterated_trace_norm,
    nystrom_G,
    operator_norm_nystrom,
    product_bounds,
    star_product,
)
from .spectra import (
    EigenEstimate,
    dense_eig_oracle,
    lambda_max_matrix,
    lambda_min_toeplitz,
    operator_norm_matrix,
)
from .symbols import (
    BetaSeries,
    FourierTable,
    SymbolSpec,
    fourier_fh_pure,
    fourier_of_inverse_symbol,
    fourier_of_symbol,
    g1_at_one,
    wiener_hopf_beta,
)

__version__ = "0.1.0"
