"""
Exception hierarchy. Callers catch ``AntichainError``; the CLI and the HTTP
routes translate the concrete classes into exit codes / status codes.
"""
from dataclasses import dataclass
from typing import Iterable, Optional


@dataclass(frozen=True)
class Diagnostic:
    message: str
    state: Optional[int] = None
    letter: Optional[str] = None
    line: Optional[int] = None

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.state is not None:
            where.append(f"state {self.state}")
        if self.letter is not None:
            where.append(f"letter {self.letter!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        return prefix + self.message


class AntichainError(Exception):
    """Base class for every error raised by the package."""


class AutomatonError(AntichainError):
    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class ParseError(AutomatonError):
    pass


class PreconditionError(AntichainError, ValueError):
    pass


class InvariantViolation(AntichainError, AssertionError):
    pass


class OracleCapExceeded(AntichainError):
    def __init__(self, what: str, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"{what}: {size} states exceeds oracle cap {cap}")


class SolverTimeout(AntichainError):
    pass
