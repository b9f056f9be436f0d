"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the sweep layer
writes into the ``error_flag`` column.
"""


class ZMHarvestError(Exception):
    code = "Error"


class ConfigError(ZMHarvestError, ValueError):
    """Invalid configuration; ``issues`` lists every violated invariant."""

    code = "ConfigError"

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(f"{c}: {msg}" for c, msg in self.issues) or "invalid config")

    @property
    def codes(self):
        return [c for c, _ in self.issues]


class CutoffTooSmall(ZMHarvestError):
    """Mode-sum tail bound exceeds the requested tolerance."""

    code = "CutoffTooSmall"


class MaxSubdivisionsExceeded(ZMHarvestError):
    code = "MaxSubdivisionsExceeded"


class NonConvergent(ZMHarvestError):
    code = "NonConvergent"


class AccuracyDomainExceeded(ZMHarvestError, ValueError):
    code = "AccuracyDomainExceeded"


class SpecialFunctionOverflow(ZMHarvestError, ArithmeticError):
    code = "SpecialFunctionOverflow"


class AsymmetricDetectors(ZMHarvestError, ValueError):
    code = "AsymmetricDetectors"


class EigenSolverFailure(ZMHarvestError):
    code = "EigenSolverFailure"


class NonSaturatedState(ZMHarvestError, ValueError):
    """Closed forms need the saturated, centred Gaussian zero-mode family."""

    code = "NonSaturatedState"


class DivergentElement(ZMHarvestError):
    """The requested matrix element is UV divergent without a regulator."""

    code = "DivergentElement"


class UnsupportedDimension(ZMHarvestError, ValueError):
    code = "UnsupportedDimension"


# exit code 2 in the CLI
NUMERICAL_ERRORS = (CutoffTooSmall, MaxSubdivisionsExceeded, NonConvergent,
                    AccuracyDomainExceeded, SpecialFunctionOverflow,
                    EigenSolverFailure, DivergentElement)
