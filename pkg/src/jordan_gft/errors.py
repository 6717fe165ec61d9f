"""Exception types shared across the package."""


class JordanGFTError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(JordanGFTError, ValueError):
    pass


class SingularMatrixError(JordanGFTError, ValueError):
    pass


class IllConditionedStructureError(JordanGFTError, ArithmeticError):
    """Rank decisions or reconstruction residuals are inconsistent."""


class SizeLimitError(JordanGFTError, ValueError):
    pass


class NormalizationUndefinedError(JordanGFTError, ValueError):
    """Requested normalization by a zero spectral radius."""


class NotAChainError(JordanGFTError, ValueError):
    """Columns do not form a (normalized) Jordan chain of the given shift."""


class MatrixParseError(JordanGFTError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
