"""Cost-efficient consumption profiles under Black-Scholes and CEV markets."""

from ._cec import (
    BsParams,
    CevParams,
    ConvergenceError,
    DomainError,
    RootNotBracketed,
    SizeMismatch,
    UnsupportedRegime,
    __version__,
    allocate,
    cost,
    efficient_cost,
    frontier,
    hedge_positions,
    kummer_m,
    laplace_qv,
    radial_cdf,
    radial_quantile,
    rearrange_antimonotone,
    sample,
    service_cost,
    state_price,
    validate,
)

__all__ = [
    "BsParams",
    "CevParams",
    "ConvergenceError",
    "DomainError",
    "RootNotBracketed",
    "SizeMismatch",
    "UnsupportedRegime",
    "__version__",
    "allocate",
    "cost",
    "efficient_cost",
    "frontier",
    "hedge_positions",
    "kummer_m",
    "laplace_qv",
    "radial_cdf",
    "radial_quantile",
    "rearrange_antimonotone",
    "sample",
    "service_cost",
    "state_price",
    "validate",
]
