"""Package exception types, mapped to distinct CLI exit codes."""


class AbelopsError(Exception):
    exit_code = 1


class UnderdeterminedError(AbelopsError):
    """A solve level admitted more than the expected solution freedom."""
    exit_code = 3

    def __init__(self, level, nullity, detail=""):
        self.level = level
        self.nullity = nullity
        super().__init__(f"underdetermined at level {level}: nullity {nullity}. {detail}")


class InconsistentError(AbelopsError):
    """An exactly-solvable system had no solution; conventions are broken."""
    exit_code = 3


class DepthError(AbelopsError):
    """A computation needs a deeper stored expansion than provided."""
    exit_code = 4

    def __init__(self, needed, have, what=""):
        self.needed = needed
        self.have = have
        super().__init__(
            f"insufficient expansion depth for {what}: have {have}, need at least {needed}; "
            f"rerun the expansion solver with a larger --depth"
        )


class BudgetError(AbelopsError):
    exit_code = 5


class FormatError(AbelopsError):
    """Bad or corrupted artifact file."""
    exit_code = 6
