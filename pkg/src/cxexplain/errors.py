"""Exception types shared across the package."""


class CxError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CxError):
    """Malformed model, formula or trace text.

    Carries a (line, column) position and, when known, the tokens that
    would have been accepted at that point.
    """

    def __init__(self, message, line=None, column=None, expected=None):
        self.line = line
        self.column = column
        self.expected = list(expected) if expected else []
        loc = f" at {line}:{column}" if line is not None else ""
        exp = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(message + loc + exp)


class UnsupportedFeatureError(CxError):
    """Input uses a construct outside the supported model subset."""

    def __init__(self, message, rule=None, line=None, column=None):
        self.rule = rule
        self.line = line
        self.column = column
        loc = f" at {line}:{column}" if line is not None else ""
        rl = f" [{rule}]" if rule else ""
        super().__init__(message + rl + loc)


class UnsupportedOperatorError(CxError):
    """Formula uses an operator outside the supported LTL subset."""


class UnknownVariableError(CxError):
    """Reference to a variable the model does not declare."""


class ModelTypeError(CxError):
    """Operator/operand kind mismatch in a model expression."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = f" at {line}:{column}" if line is not None else ""
        super().__init__(message + loc)


class UnboundInstanceParamError(CxError):
    """Instance argument list does not match the module's parameters."""


class DuplicateNameError(CxError):
    """Two declarations share one name inside a scope."""


class TraceSchemaError(CxError):
    """Native trace document violates its schema."""


class MissingInitialValueError(CxError):
    """A declared variable has no value in the first trace state."""


class CombinationalCycleError(CxError):
    """Connection cycle not broken by any DELAY delayed-source input."""

    def __init__(self, message, cycle=None):
        self.cycle = list(cycle) if cycle else []
        super().__init__(message)


class SimulationError(CxError):
    """Evaluation failure; carries the offending block/gate and step."""

    def __init__(self, message, block=None, gate=None, step=None):
        self.block = block
        self.gate = gate
        self.step = step
        where = block or gate
        super().__init__(f"{message} (at {where}, step {step})")


class DivisionByZeroError(SimulationError):
    pass


class RangeEscapeError(SimulationError):
    pass


class ChoiceUnsatisfiedError(SimulationError):
    pass


class UnknownGateError(CxError):
    """Explanation target names a gate/variable that does not exist."""


class TargetOutsideTraceError(CxError):
    """Explanation target step is outside the trace."""


class StepUnderflowError(CxError):
    """Local-cause request below step 1."""


class StepOutOfRangeError(CxError):
    """Formula position outside [1, trace length]."""


class ScopeTooLargeError(CxError):
    """Brute-force cause enumeration refused: candidate scope too big."""


class NoLoopForTemporalError(CxError):
    """Temporal operators need a lasso; the trace has no loop."""
