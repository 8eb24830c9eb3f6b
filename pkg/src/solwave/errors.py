"""Exception hierarchy shared by every stage of the pipeline."""


class SolwaveError(Exception):
    """Base class for all library errors; the CLI exits with ``exit_code``."""

    exit_code = 3


class EquationSyntaxError(SolwaveError, SyntaxError):
    """Malformed equation or profile text.

    ``lineno`` and ``offset`` follow the :class:`SyntaxError` convention
    (1-based line and column).
    """

    exit_code = 2

    def __init__(self, message, lineno=None, offset=None, text=None):
        SyntaxError.__init__(self, message)
        self.msg = message
        self.lineno = lineno
        self.offset = offset
        self.text = text

    def __str__(self):
        if self.lineno is None:
            return self.msg
        return f"{self.msg} (line {self.lineno}, column {self.offset})"


class UndeclaredSymbol(EquationSyntaxError):
    pass


class NonPolynomialInput(EquationSyntaxError):
    pass


class CyclicBinding(SolwaveError, ValueError):
    pass


class UnboundSymbol(SolwaveError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NonFiniteResult(SolwaveError, ArithmeticError):
    pass


class NotExactlyIntegrable(SolwaveError, ValueError):
    def __init__(self, term):
        super().__init__(f"term is not an exact xi-derivative: {term}")
        self.term = term


class NotIntegrated(SolwaveError, ValueError):
    pass


class NonAutonomousEquation(SolwaveError, ValueError):
    pass


class AnsatzOrderUndetermined(SolwaveError, ValueError):
    pass


class MixedScales(SolwaveError, ValueError):
    pass


class EmptySystem(SolwaveError, ValueError):
    pass


class DepthLimitExceeded(SolwaveError, RuntimeError):
    pass


class ConstraintUnsatisfiable(SolwaveError, ValueError):
    pass


class VerificationFailed(SolwaveError):
    exit_code = 4

