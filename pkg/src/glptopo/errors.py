"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed textual input; carries the zero-based offending position."""

    def __init__(self, message, position):
        super().__init__("%s (at position %d)" % (message, position))
        self.position = position


class CapExceeded(RuntimeError):
    """An exhaustive scan would exceed the configured work cap."""


class MagariViolation(ValueError):
    """An operator table fails one of the Magari axioms.

    ``axiom`` is "M1" or "M2"; ``witness`` is the offending subset mask
    (or a pair of masks for the additivity half of M1).
    """

    def __init__(self, axiom, witness, message):
        super().__init__(message)
        self.axiom = axiom
        self.witness = witness
