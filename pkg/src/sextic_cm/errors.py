"""Exception hierarchy.

Every error belongs to one of three families, which the CLI maps to exit
codes: bad input (2), numerical indeterminacy (3) and broken internal
invariants (4).
"""


class CMError(Exception):
    exit_code = 4


class ValidationError(CMError):
    exit_code = 2


class NumericalError(CMError):
    exit_code = 3


class InvariantError(CMError):
    exit_code = 4


# field_core
class PolynomialReducible(ValidationError):
    pass


class NotTotallyImaginary(ValidationError):
    pass


class BasisNotARing(ValidationError):
    pass


class DiscriminantMismatch(ValidationError):
    pass


class NotCM(ValidationError):
    pass


# ideal_lattice
class FieldMismatch(ValidationError):
    pass


class ZeroIdeal(ValidationError):
    pass


class IndexDivisor(InvariantError):
    pass


class PrecisionTooLow(NumericalError):
    pass


# abgroup
class InfiniteQuotient(ValidationError):
    pass


class VerificationFailed(ValidationError):
    pass


class BoundTooLarge(ValidationError):
    pass


# cm_types
class NotSexticCM(ValidationError):
    pass


class UnrecognizedPattern(InvariantError):
    pass


class KindMismatch(ValidationError):
    pass


# shimura
class NoRamifiedPrime(ValidationError):
    pass


# cm_construct
class PrecisionExhausted(NumericalError):
    pass


class NotFound(InvariantError):
    pass


class Unreachable(InvariantError):
    pass


# periods
class NotPrincipal(InvariantError):
    pass


class SingularBlock(NumericalError):
    pass


class NonConvergence(NumericalError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate or []


# theta
class TailBoundFailure(NumericalError):
    pass


class Indeterminate(NumericalError):
    pass
