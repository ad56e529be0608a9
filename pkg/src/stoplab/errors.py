"""Exception types shared by the solvers."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ExtendTableError(DomainError):
    """A cutoff table is too short for the requested evaluation."""
