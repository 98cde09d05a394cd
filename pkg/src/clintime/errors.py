"""Exception hierarchy shared by every pipeline stage."""


class ClintimeError(Exception):
    """Base class for all package errors."""


class DataError(ClintimeError):
    """Bad input data; the CLI maps these to exit code 2."""


class ParseError(DataError):
    def __init__(self, line: int, reason: str, path=None):
        self.line = line
        self.reason = reason
        self.path = path
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {reason}")


class ValidationError(DataError):
    def __init__(self, id: str, constraint: str):
        self.id = id
        self.constraint = constraint
        super().__init__(f"{id}: {constraint}")


class GazetteerLoadError(DataError):
    def __init__(self, file, reason: str = "cannot load"):
        self.file = file
        super().__init__(f"{file}: {reason}")


class TemplateSyntaxError(DataError):
    def __init__(self, line: int, col: int, reason: str = "malformed template"):
        self.line = line
        self.col = col
        super().__init__(f"template line {line}, col {col}: {reason}")


class ColumnOutOfRange(DataError):
    def __init__(self, template: str, column: int):
        self.template = template
        self.column = column
        super().__init__(f"template {template} references missing column {column}")


class InvalidGoldLabel(DataError):
    pass


class OverlappingMentions(DataError):
    pass


class NonFiniteObjective(ClintimeError):
    """Raised when the CRF objective or gradient stops being finite."""


class RuleCompileError(DataError):
    def __init__(self, id: str, reason: str):
        self.id = id
        super().__init__(f"rule {id}: {reason}")


class UnnormalizableExpression(ClintimeError):
    pass


class MissingAnchorDate(ClintimeError):
    pass


class EmptyCorpus(DataError):
    pass


class ConfigError(DataError):
    pass
