from __future__ import annotations


class HermError(Exception):
    """Base class for all errors raised by herm."""


class TypeMismatch(HermError):
    pass


class SignatureError(HermError):
    pass


class ParseError(HermError):
    """A lexical, name or typing error in formula source, with its span."""

    def __init__(self, message: str, span: tuple[int, int] | None = None, source: str = ""):
        self.message = message
        self.span = span
        self.source = source
        super().__init__(self._render())

    def _render(self) -> str:
        if self.span is None:
            return self.message
        start, end = self.span
        return f"{self.message} at {start}:{end}"


class EmbeddingError(HermError):
    pass


class OutsideFragment(HermError):
    """The reasoner cannot decide this input with its current machinery."""


class BudgetExhausted(HermError):
    pass


class CorpusError(HermError):
    """Integrity problems found while loading a corpus document."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
