"""Exception types shared across the package."""


class ArsError(ValueError):
    """Invalid input: out-of-range node, malformed system, bad argument."""


class ParseError(ArsError):
    """A text input could not be parsed.

    ``line`` is 1-based for file input; ``position`` is a 0-based character
    offset for formula input. Either may be ``None``.
    """

    def __init__(self, message, line=None, position=None):
        self.line = line
        self.position = position
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"position {position}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class NotConfluentError(ArsError):
    """Two nodes of a component have no common reduct."""

    def __init__(self, pair, component=None):
        self.pair = tuple(pair)
        self.component = component
        msg = f"no common reduct for {self.pair[0]},{self.pair[1]}"
        if component is not None:
            msg += f" in component {component}"
        super().__init__(msg)
