"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class HindepError(Exception):
    code = "error"


class ParameterError(HindepError, ValueError):
    code = "parameter"


class DimensionError(HindepError, ValueError):
    code = "dimension"


class ResourceError(HindepError, RuntimeError):
    code = "resource"


class NumericalError(HindepError, ArithmeticError):
    code = "numerical"


class ParseError(HindepError, ValueError):
    code = "parse"


class DegenerateDataWarning(UserWarning):
    pass
