"""Exception type shared by every module.

Each failure carries a short machine-readable ``code`` (for example
``"NON_POSITIVE_PARAM"``) so that callers and the command line can branch on
the kind of failure without parsing messages.
"""

from __future__ import annotations


class HTDError(ValueError):
    """Invalid input or an unsatisfiable request.

    Parameters
    ----------
    code : str
        Upper-case identifier of the failure kind.
    message : str
        Human-readable explanation.
    """

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}" if message else code)


class ParseError(HTDError):
    """Malformed distribution expression.

    ``offset`` is the 0-based character position of the offending token and
    ``expected`` lists what the parser would have accepted there.
    """

    def __init__(self, code: str, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        super().__init__(code, f"{message} (offset {offset})")
