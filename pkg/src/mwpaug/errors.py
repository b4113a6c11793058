"""Exception hierarchy for equation parsing, evaluation, and rewriting."""


class MwpError(Exception):
    """Base class for all package errors."""


class EquationSyntaxError(MwpError, ValueError):
    """Malformed equation text: unbalanced parens, dangling operator, bad '='.

    Also a ValueError, like json.JSONDecodeError, so callers probing text
    for a number can use the familiar idiom.
    """


class MultipleUnknowns(EquationSyntaxError):
    """Left side is not a single unknown, or the unknown reappears on the right."""


class DivisionByZero(MwpError):
    """A division with zero denominator was evaluated or would be emitted."""


class UnboundVariable(MwpError):
    """Evaluation hit a variable leaf with no binding."""


class NonIntegerExponent(MwpError):
    """Exponentiation with a non-integer exponent value."""


class UnalignedNumber(MwpError):
    """An equation number has no text mention and is not a known constant."""


class NoVariable(MwpError):
    """Neither child of the node contains the unknown."""


class BothSidesVariable(MwpError):
    """Both children of the node contain the unknown; the leaf is not isolatable."""


class PowerEncountered(MwpError):
    """Inversion reached a '^' node; such targets should be filtered upstream."""


class NoQuestionFound(MwpError):
    """No discourse unit matches any interrogative pronoun pattern."""


class UnsupportedQuestionShape(MwpError):
    """The question does not match any declarative rewrite template."""


class UnsupportedDeclarativeShape(MwpError):
    """The declarative unit does not admit a question rewrite."""
