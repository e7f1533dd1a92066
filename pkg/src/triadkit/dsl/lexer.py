from __future__ import annotations

import re
from dataclasses import dataclass

IDENT, NUMBER, STRING, PLACEHOLDER, PUNCT, ERROR, EOF = (
    "IDENT", "NUMBER", "STRING", "PLACEHOLDER", "PUNCT", "ERROR", "EOF")



_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<number>[0-9]+(?:\.[0-9]+)?)
  | (?P<ident>[^\W\d_]\w*)
  | (?P<placeholder>\$[^\W\d_]\w*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>->|\+=|-=|!=|[{}();,:|=<>/.*-])
""", re.VERBOSE)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    value: object = None

    def __str__(self):
        return "end of input" if self.kind == EOF else repr(self.text)


def _unescape(body: str) -> str | None:
    out, i = [], 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                return None
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; bad characters become ERROR tokens."""
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    last = (1, 1)
    while pos < n:
        col = pos - line_start + 1
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == '"':
                end = text.find("\n", pos)
                end = n if end < 0 else end
                tokens.append(Token(ERROR, "unterminated string", line, col))
                pos = end
            else:
                tokens.append(Token(ERROR, f"unexpected character {text[pos]!r}", line, col))
                pos += 1
            last = (line, col)
            continue
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("ws", "comment"):
            pass
        elif kind == "number":
            tokens.append(Token(NUMBER, lexeme, line, col))
            last = (line, col)
        elif kind == "ident":
            tokens.append(Token(IDENT, lexeme, line, col))
            last = (line, col)
        elif kind == "placeholder":
            tokens.append(Token(PLACEHOLDER, lexeme[1:], line, col))
            last = (line, col)
        elif kind == "string":
            value = _unescape(lexeme[1:-1])
            if value is None:
                tokens.append(Token(ERROR, "invalid escape in string", line, col))
            else:
                tokens.append(Token(STRING, lexeme, line, col, value))
            last = (line, col)
        else:
            tokens.append(Token(PUNCT, lexeme, line, col))
            last = (line, col)
        pos = m.end()
    # EOF points at the last real token so diagnostics stay inside the text
    tokens.append(Token(EOF, "", *last))
    return tokens
