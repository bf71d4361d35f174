"""Spectral recovery from iterated operator measurements.

The core pipeline (`annihilator`) is instance independent: it consumes a
stack of measurement rows, finds the minimal annihilating polynomial of
the underlying evolution, and maps the nonzero roots back through a
symbol supplied by one of the instance modules (`classic`, `confluent`,
`dynamical`, `channel`). `oracle` holds slow reference implementations
used to cross-check the fast paths.
"""

from . import channel, classic, confluent, dynamical, numerics, oracle
from .annihilator import (
    AnnihilatorResult,
    CoefficientFit,
    InstanceDescriptor,
    MeasurementRecord,
    Mode,
    RecoveryConfig,
    RecoveryResult,
    ShiftCombination,
    SparseSignalModel,
    SymbolValidation,
    build_block_hankel,
    intersect_spectra,
    minimal_annihilator,
    recover_coefficients,
    recover_spectrum,
    run_recovery,
    validate_symbol,
)
from .errors import (
    ContractViolationError,
    NonUniqueCoefficientsWarning,
    NotEnoughMeasurementsError,
    SpuriousRootError,
    SymbolNotInjectiveError,
)

__version__ = "0.1.0"

__all__ = [
    "AnnihilatorResult",
    "CoefficientFit",
    "ContractViolationError",
    "InstanceDescriptor",
    "MeasurementRecord",
    "Mode",
    "NonUniqueCoefficientsWarning",
    "NotEnoughMeasurementsError",
    "RecoveryConfig",
    "RecoveryResult",
    "ShiftCombination",
    "SparseSignalModel",
    "SpuriousRootError",
    "SymbolNotInjectiveError",
    "SymbolValidation",
    "build_block_hankel",
    "channel",
    "classic",
    "confluent",
    "dynamical",
    "intersect_spectra",
    "minimal_annihilator",
    "numerics",
    "oracle",
    "recover_coefficients",
    "recover_spectrum",
    "run_recovery",
    "validate_symbol",
    "__version__",
]
