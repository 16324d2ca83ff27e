class PickError(Exception):
    """Base class; `code` is a stable machine-readable tag."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code

    def to_json(self) -> dict:
        return {"code": self.code, "message": str(self)}


class InputError(PickError):
    """Malformed or inconsistent input (dimensions, sizes, file contents)."""


class ValidationError(InputError):
    """An interpolation instance violates one or more invariants."""

    def __init__(self, violations: list[InputError]):
        self.violations = violations
        msg = "; ".join(f"[{v.code}] {v}" for v in violations)
        super().__init__(violations[0].code if violations else "invalid", msg)

    def to_json(self) -> dict:
        return {"code": "validation", "violations": [v.to_json() for v in self.violations]}


class DomainError(PickError):
    """A point lies on or outside the boundary of the domain."""


class DegenerateError(PickError):
    """A weight or Gram matrix is numerically zero."""


class OutsideOmegaFError(PickError):
    """A point where the pairing <f, k_z^f> vanishes, so the rescaled kernel is undefined."""
