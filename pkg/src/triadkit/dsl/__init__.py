"""The ``.tdk`` text language: parser and canonical printer."""

from pathlib import Path

from ..errors import ParseError
from .parser import Diagnostic, ParseResult, SourceDocument, parse_document, parse_expression
from .printer import print_canonical


def load(path, *, resolve: bool = True):
    """Parse a file, raising ParseError when it has error diagnostics."""
    path = Path(path)
    result = parse_document(SourceDocument(path.read_text(encoding="utf-8"), str(path)),
                            resolve=resolve)
    if not result.ok:
        raise ParseError(result.diagnostics)
    return result.schema


def loads(text: str, *, resolve: bool = True):
    result = parse_document(SourceDocument(text), resolve=resolve)
    if not result.ok:
        raise ParseError(result.diagnostics)
    return result.schema


__all__ = [
    "Diagnostic", "ParseResult", "SourceDocument", "load", "loads",
    "parse_document", "parse_expression", "print_canonical",
]
