"""Exception hierarchy.

Data problems derive from :class:`DataError`, numerical breakdowns from
:class:`NumericalError`; the command line maps the two families to distinct
exit codes.
"""


class MSLError(Exception):
    """Base class for all package errors."""


class DataError(MSLError, ValueError):
    """Input data is unusable."""


class NumericalError(MSLError, ArithmeticError):
    """A numerical routine failed to produce a usable result."""


class DegenerateColumn(DataError):
    """A covariate column has zero sample standard deviation."""


class EmptyProblem(DataError):
    """An isotonic problem with no observations."""


class MissingColumn(DataError):
    """A required CSV column is absent."""


class EmptyAfterFilter(DataError):
    """Filtering left too few observations in a group."""


class ParseError(DataError):
    """A CSV cell could not be parsed."""

    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class RankDeficient(DataError):
    """The pooled design matrix does not have full column rank."""


class QuadratureFailure(NumericalError):
    """Numerical integration produced a non-finite or unreliable value."""


class OptimizerFailure(NumericalError):
    """No optimizer start produced a finite objective."""


class Separation(NumericalError):
    """Newton iterations diverged (groups perfectly separated)."""


class ZeroMass(NumericalError):
    """A reconstructed density carries no mass on the Monte Carlo cloud."""


class SamplingFailure(NumericalError):
    """Monte Carlo draws kept landing where the pooled density underflows."""


class TooManyFailures(NumericalError):
    """Too many replicates failed in a resampling or simulation run."""
