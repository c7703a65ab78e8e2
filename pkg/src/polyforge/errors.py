"""Exception types shared across the package."""

from __future__ import annotations


class PolyforgeError(Exception):
    pass


class MalformedPresentation(PolyforgeError, ValueError):
    pass


class LimitExceeded(PolyforgeError):
    """A resource bound was hit.  This never certifies infiniteness."""

    def __init__(self, limit: int, what: str = "cosets", high_water: int | None = None):
        self.limit = limit
        self.what = what
        self.high_water = high_water
        super().__init__(f"{what} limit {limit} exceeded")


class NotACGroup(PolyforgeError):
    def __init__(self, condition: str, witness):
        self.condition = condition
        self.witness = witness
        super().__init__(f"not a string C-group: {condition} (witness {witness!r})")


class NotARotationGroup(PolyforgeError):
    def __init__(self, condition: str, witness):
        self.condition = condition
        self.witness = witness
        super().__init__(f"not a rotation group: {condition} (witness {witness!r})")


class UnsupportedRank(PolyforgeError):
    pass


class DegenerateQuotient(PolyforgeError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"quotient is not a polytope: {report.violation}")


class InvalidRange(PolyforgeError, ValueError):
    pass


class TypeMismatch(PolyforgeError):
    pass


class IncompatibleSections(PolyforgeError):
    pass
