"""Exception and warning types shared across the library."""


class ContractViolationError(ValueError):
    """An argument violates a documented precondition (shape, degree, duplicates...)."""


class NotEnoughMeasurementsError(ContractViolationError):
    """Too few measurements for the requested annihilator degree.

    Carries ``required_L`` so callers can report how many samples would do.
    """

    def __init__(self, message, required_L=None):
        super().__init__(message)
        self.required_L = required_L


class SpuriousRootError(ValueError):
    """An annihilator root has no preimage in Omega within tolerance.

    Signals model mismatch or noise; carries the offending root.
    """

    def __init__(self, message, root=None):
        super().__init__(message)
        self.root = root


class SymbolNotInjectiveError(ValueError):
    """Two spectral points map to the same symbol value within tolerance."""


class NonUniqueCoefficientsWarning(UserWarning):
    """The coefficient system is rank deficient; the reported solution is
    the minimum-norm representative of an affine family."""
