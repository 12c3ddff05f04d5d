"""Exception types shared across the package."""


class BadApproxError(Exception):
    """Base class for every package-specific error."""


class ConstraintViolation(BadApproxError):
    """A supplied or derived parameter breaks one of its defining inequalities.

    ``constraint`` names the rule that failed so callers (and the CLI) can
    report exactly which inequality was violated.
    """

    def __init__(self, constraint, message):
        self.constraint = constraint
        super().__init__(f"{constraint}: {message}")


class DomainError(BadApproxError):
    """A point lies outside the working interval of a curve."""


class DiophantineConditionSuspect(BadApproxError):
    """Finite-range evidence that a line slope fails its Diophantine condition."""

    def __init__(self, tau, floor, witness_q):
        self.tau = tau
        self.floor = floor
        self.witness_q = witness_q
        super().__init__(
            f"tau estimate {tau} at q={witness_q} is below the floor {floor}"
        )


class ConditionViolated(BadApproxError):
    """The removal-budget condition of the dimension bound fails at some level."""

    def __init__(self, level, lhs, rhs):
        self.level = level
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(f"budget condition fails at n={level}: {lhs} > {rhs}")


class EmptyLevel(BadApproxError):
    """A construction level lost all of its intervals."""

    def __init__(self, level, detail=""):
        self.level = level
        self.detail = detail
        msg = f"no survivors at level {level}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class BudgetExceeded(BadApproxError):
    """An enumeration box grew past the configured cap."""

    def __init__(self, needed, cap, detail=""):
        self.needed = needed
        self.cap = cap
        self.detail = detail
        msg = f"enumeration box needs {needed} coefficient pairs, cap is {cap}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class Degenerate(BadApproxError):
    """A star interval ended up in a shape the parameters should forbid."""


class ClassificationFailure(BadApproxError):
    """No class bracket admits a star's stored values.

    Indicates a rounding fault upstream; surfaced instead of clamping.
    """


class InvariantViolation(BadApproxError):
    """A hard structural invariant failed (never clamped, always raised)."""
