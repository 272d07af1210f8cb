"""Exception types shared by all debranges modules.

Every failure mode that callers are expected to branch on gets its own
class; the class name doubles as the machine-readable error code in CLI
error bodies.
"""

from __future__ import annotations


class DeBrangesError(Exception):
    """Base class for all library errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class ValidationError(DeBrangesError):
    """Raw spectral data violates at least one invariant.

    Carries the full list of violations so a caller sees every problem
    at once, not just the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(f"{c}: {m}" for c, m in self.violations))

    @property
    def codes(self):
        return [c for c, _ in self.violations]


# validation violation codes (used inside ValidationError and standalone)
class NonIncreasingNodes(ValidationError):
    def __init__(self, msg="nodes must be strictly increasing"):
        ValidationError.__init__(self, [(type(self).__name__, msg)])


class ZeroNode(ValidationError):
    def __init__(self, msg="0 is not an admissible node"):
        ValidationError.__init__(self, [(type(self).__name__, msg)])


class NonPositiveMass(ValidationError):
    def __init__(self, msg="all masses must be positive"):
        ValidationError.__init__(self, [(type(self).__name__, msg)])


class DivergentTail(ValidationError):
    def __init__(self, msg="declared tail series diverges"):
        ValidationError.__init__(self, [(type(self).__name__, msg)])


class InvalidRatio(DeBrangesError):
    pass


class InvalidExponent(DeBrangesError):
    pass


class EmptySelection(DeBrangesError):
    pass


class EvaluationAtNode(DeBrangesError):
    pass


class PhaseBracketFailure(DeBrangesError):
    pass


class NoSignChange(DeBrangesError):
    pass


class ContractionFailure(DeBrangesError):
    pass


class WitnessNotFound(DeBrangesError):
    pass


class SignConditionFailure(DeBrangesError):
    pass


class RootNotFound(DeBrangesError):
    pass


class DominanceFailure(DeBrangesError):
    pass


class SubsequenceNeeded(DeBrangesError):
    pass


class HypothesisFailure(DeBrangesError):
    pass


class DegenerateNullSpace(DeBrangesError):
    pass


class IndexMismatch(DeBrangesError):
    pass


class NodeCollision(DeBrangesError):
    pass


class DegreeTooHigh(DeBrangesError):
    pass


class LambdaOnGrid(DeBrangesError):
    pass


class TruncationTooSmall(DeBrangesError):
    pass


class RotatedNodeCollision(DeBrangesError):
    pass


class BandOverlap(DeBrangesError):
    pass


class QuadratureUnstable(DeBrangesError):
    pass
