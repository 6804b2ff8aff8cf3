"""Error types shared across the package."""


class ValidationError(Exception):
    """Raised when user-supplied input (files, configs, matrices) fails validation.

    The CLI maps this to exit code 2; everything else unexpected maps to 1.
    """
