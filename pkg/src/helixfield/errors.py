class ConfigError(ValueError):
    """Invalid run configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, reason: str):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason


class CourantError(ValueError):
    pass


class InstabilityError(RuntimeError):
    """A field magnitude crossed the configured ceiling during stepping."""

    def __init__(self, step: int, field: str, magnitude: float):
        super().__init__(f"field {field!r} reached |value| = {magnitude:.6g} at step {step}")
        self.step = step
        self.field = field
        self.magnitude = magnitude


class LatticeMismatchError(ValueError):
    pass
