"""Exception types shared across the package."""


class SizeLimitError(ValueError):
    """Raised when a request exceeds a backend's qubit or vertex budget."""


class ZeroProbabilityError(ValueError):
    """Raised when a forced measurement branch or projection has no weight."""


class ScenarioError(ValueError):
    """Raised for malformed scenario files; message carries line/field info."""
