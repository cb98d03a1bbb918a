"""Exception types shared across the package."""


class LevelboundError(Exception):
    """Base class for package-specific failures."""


class UnsupportedPartitionError(LevelboundError):
    """Partition violates an assumption of the requested computation."""


class AbsorbingLevelError(LevelboundError):
    """A non-optimal level cannot reach any higher level."""


class GuardError(LevelboundError):
    """A size guard refused the computation (exit code 3 on the CLI)."""
