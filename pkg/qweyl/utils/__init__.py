"""utils/initialization."""

import contextlib
import platform


def emojis(str=""):
    """Returns an emoji-safe version of a string, stripped of emojis on Windows platforms."""
    return str.encode().decode("ascii", "ignore") if platform.system() == "Windows" else str


class TryExcept(contextlib.ContextDecorator):
    # Usage: @TryExcept() decorator or 'with TryExcept():' context manager
    def __init__(self, msg="", errors=None):
        """Collects an exception raised inside the block into `errors` (a list) instead of propagating it."""
        self.msg = msg
        self.errors = errors

    def __enter__(self):
        return self

    def __exit__(self, exc_type, value, traceback):
        """Records the error message and swallows the exception; always returns True."""
        if value:
            text = emojis(f"{self.msg}{': ' if self.msg else ''}{type(value).__name__}: {value}")
            if self.errors is not None:
                self.errors.append(text)
            else:
                print(text)
        return True
