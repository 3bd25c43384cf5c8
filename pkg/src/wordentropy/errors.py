"""Exception types shared across the package."""


class WordEntropyError(Exception):
    pass


class PreconditionError(WordEntropyError, ValueError):
    """Input does not satisfy what the algorithm needs to be correct."""


class NotTranslationApparent(PreconditionError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ResourceLimitExceeded(WordEntropyError):
    """A configurable node or iteration cap was reached."""


class NonConvergence(WordEntropyError, RuntimeError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
