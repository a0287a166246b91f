"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid input: carrier mismatch, signature violation, bad document."""


class UnsupportedCarrierError(InputError):
    """An operation was asked for on a carrier it does not support."""


class NoLimitError(InputError):
    """A sequence handed to a limit-taking operation does not stabilize."""
