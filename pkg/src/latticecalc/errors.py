"""Exception hierarchy shared by every module.

Each class carries the CLI exit code it maps to.
"""


class LatticeCalcError(Exception):
    """Base class for library errors."""

    exit_code = 2


class DomainError(LatticeCalcError, ValueError):
    """An argument lies outside the documented domain of an operation."""

    exit_code = 2


class ContractError(LatticeCalcError):
    """An input function fails an admissibility check (growth, summability, support)."""

    exit_code = 2


class CapacityError(LatticeCalcError):
    """A request exceeds a documented size cap."""

    exit_code = 2


class AccuracyError(LatticeCalcError):
    """The requested accuracy cannot be certified."""

    exit_code = 3


class DegenerateFitError(AccuracyError):
    """Every sample of a decay fit is below the noise floor."""

    exit_code = 3
