"""Exception hierarchy shared by all ellbrauer modules."""


class EllBrauerError(Exception):
    """Base class for every error raised by this package."""


# field construction / arithmetic
class ReduciblePolynomial(EllBrauerError):
    pass


class NoRootOfUnity(EllBrauerError):
    pass


class BadCharacteristic(EllBrauerError):
    pass


class NotRootOfUnity(EllBrauerError):
    pass


class ZeroInput(EllBrauerError):
    pass


class DegreeOverflow(EllBrauerError):
    pass


# curves
class PointNotOnCurve(EllBrauerError):
    pass


class CapExceeded(EllBrauerError):
    pass


class SuppliedPointNotOnCurve(EllBrauerError):
    pass


# function field
class DivisionByZeroFunction(EllBrauerError):
    pass


class ZeroFunction(EllBrauerError):
    pass


class NotPrincipal(EllBrauerError):
    pass


class NotTorsion(EllBrauerError):
    pass


class NotOrderQ(EllBrauerError):
    pass


class CertificateMismatch(EllBrauerError):
    pass


# galois / torsion
class NotABasis(EllBrauerError):
    pass


class WrongOrder(EllBrauerError):
    pass


class VerificationFailed(EllBrauerError):
    pass


class NotGalois(EllBrauerError):
    pass


class MatrixNotSL2(EllBrauerError):
    pass


class NoUnipotentGenerator(EllBrauerError):
    pass


# brauer engine
class PoleAtEvaluation(EllBrauerError):
    pass


class WrongCase(EllBrauerError):
    pass


class NotFiniteQuotient(EllBrauerError):
    pass


class IncompleteMWData(EllBrauerError):
    pass


# corestriction
class NotPrimeDegree(EllBrauerError):
    pass


class ChainFailure(EllBrauerError):
    pass


# cli / reporting
class UnknownExample(EllBrauerError):
    pass


class ConfigInvalid(EllBrauerError):
    pass
