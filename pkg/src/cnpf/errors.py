"""Exception hierarchy for cnpf."""


class CnpfError(Exception):
    """Base class for all library errors."""


class PointOutsideDomain(CnpfError):
    pass


class NumericOverflow(CnpfError):
    pass


class UnsupportedFamily(CnpfError):
    pass


class NotCNP(CnpfError):
    def __init__(self, index, value):
        super().__init__(f"row coefficient b_{index} = {value!r} is negative")
        self.index = index
        self.value = value


class NonNormalized(CnpfError):
    pass


class NotHermitian(CnpfError):
    pass


class KernelDivisionByZero(CnpfError, ZeroDivisionError):
    pass


class DegenerateConstraint(CnpfError):
    pass


class DimensionMismatch(CnpfError):
    pass


class OrderMismatch(CnpfError):
    pass


class ZeroConstantTerm(CnpfError):
    pass


class NotUnivariate(CnpfError):
    pass


class NonRadialUnsupported(CnpfError):
    pass


class QuadratureBudgetExceeded(CnpfError):
    pass


class NotUnitNorm(CnpfError):
    pass


class AlphaOutOfRange(CnpfError):
    pass


class TailTooLarge(CnpfError):
    pass


class TargetOutOfRange(CnpfError):
    pass


class ConfigParse(CnpfError):
    pass


class CheckFailed(CnpfError):
    pass
