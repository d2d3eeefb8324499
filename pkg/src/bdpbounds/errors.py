"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures onto its
documented exit status table without a lookup of its own.
"""

from __future__ import annotations


class BDPError(Exception):
    exit_code = 4


class ConfigError(BDPError, ValueError):
    exit_code = 2


class InvalidParameter(BDPError, ValueError):
    exit_code = 2


class UnknownPreset(InvalidParameter):
    pass


class NegativeRate(BDPError, ValueError):
    pass


class DimensionMismatch(BDPError, ValueError):
    pass


class KindMismatch(BDPError, ValueError):
    pass


class NegativeDiscriminant(BDPError, ArithmeticError):
    exit_code = 3


class Infeasible(BDPError):
    exit_code = 3

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        self.detail = detail
        msg = f"Infeasible({condition})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class HypothesisUnmet(BDPError):
    exit_code = 3


class RequiresFinite(HypothesisUnmet):
    pass


class EpsilonTooLarge(BDPError, ValueError):
    exit_code = 3


class OrderViolation(HypothesisUnmet):
    pass


class StepFailure(BDPError, RuntimeError):
    pass


class OutOfRange(BDPError, ValueError):
    pass


class TruncationLoss(BDPError, RuntimeError):
    pass
