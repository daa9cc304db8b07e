"""Optimal prize design and equilibrium computation for asymmetric all-pay contests."""

from .config import (
    CASE_STUDY,
    ConfigError,
    LoadedConfig,
    NumericsSettings,
    case_study_spec,
    load_config,
    parse_config,
)
from .model import (
    AtomUniform,
    ContestSpec,
    DomainError,
    MonomialPayment,
    PiecewiseCdf,
    PowerLaw,
    PrizeSchedule,
    Strategy,
    TypeDistribution,
    Uniform,
    ValueScale,
    normalized_payment,
    validate_payment,
)
from .numerics import (
    BracketError,
    IntegrationError,
    Interval,
    MonotonicityError,
    NumericsError,
    QuadratureError,
    Tolerance,
    find_root,
    integrate,
    monotone_inverse,
    solve_ode_backward,
)

__version__ = "0.1.0"
