class UsageError(ValueError):
    """Bad arguments or inputs; the CLI maps this to exit code 2."""


class UnsupportedKernelError(UsageError):
    """Operation needs a finite slope bound, but the kernel has none (ball)."""


class EmptySupportError(UsageError):
    """Threshold at or above the kernel peak, so the super-level set is empty."""
