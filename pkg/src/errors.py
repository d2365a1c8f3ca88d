"""
Exceptions raised by the mp-pagerank package.

The CLI maps each family to an exit code: input/format problems exit 1,
precondition and numerical failures exit 2.
"""


class PageRankError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


# Input / format errors (exit 1)

class ConfigError(PageRankError):
    """A flag, environment value or solver setting is out of range."""


class GraphFormatError(PageRankError):
    """The graph text could not be turned into a valid hyperlink graph."""


class MalformedLine(GraphFormatError):
    def __init__(self, line_no, text, reason="expected two integers"):
        self.line_no = line_no
        self.text = text
        super().__init__(f"line {line_no}: {reason}: {text!r}")


class DanglingPage(GraphFormatError):
    def __init__(self, page):
        self.page = page
        super().__init__(f"page {page} has no out-links (dangling page)")


class IndexOutOfRange(GraphFormatError):
    def __init__(self, page, n):
        self.page = page
        self.n = n
        super().__init__(f"page index {page} outside [0, {n})")


class DuplicateEdge(GraphFormatError):
    def __init__(self, src, dst):
        self.src = src
        self.dst = dst
        super().__init__(f"duplicate edge {src} -> {dst}")


# Precondition errors (exit 2)

class PreconditionError(PageRankError):
    exit_code = 2


class NotStronglyConnected(PreconditionError):
    def __init__(self, n_components):
        self.n_components = n_components
        super().__init__(
            f"size estimation requires a strongly connected graph "
            f"(found {n_components} strong components)"
        )


class TooLargeForDense(PreconditionError):
    def __init__(self, n, limit):
        self.n = n
        self.limit = limit
        super().__init__(f"dense oracle limited to n <= {limit}, got n = {n}")


# Numerical errors (exit 2)

class NumericalError(PageRankError):
    exit_code = 2


class SingularSystem(NumericalError):
    def __init__(self, detail=""):
        message = "(I - alpha*A) is singular; the graph is corrupted"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class NoConvergence(NumericalError):
    def __init__(self, iters, delta):
        self.iters = iters
        self.delta = delta
        super().__init__(f"power iteration did not converge in {iters} iterations (last delta {delta:.3e})")


class InvariantViolation(NumericalError):
    """An oracle post-condition (entry sum, positivity) failed."""


class NonPositiveEntry(NumericalError):
    def __init__(self, page, value):
        self.page = page
        self.value = value
        super().__init__(f"s[{page}] = {value!r} is not positive; iterate has not converged")
