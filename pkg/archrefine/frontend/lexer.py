# Copyright 2024 The archrefine Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#            http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
`lexer.py`
Tokenizer shared by architecture and script files.
"""

import re
from dataclasses import dataclass
from typing import Optional

from archrefine.errors import Diagnostic, ParseError, SourceSpan

KEYWORDS = frozenset(
    [
        "adapt",
        "alphabet",
        "and",
        "behavior",
        "channel",
        "chaotic",
        "component",
        "emit",
        "empty",
        "has",
        "in",
        "init",
        "inputs",
        "invariant",
        "machine",
        "nonempty",
        "on",
        "out",
        "outputs",
        "range",
        "rename",
        "states",
        "sub",
        "system",
        "trivial",
        "true",
    ]
)

PUNCTUATION = {
    "->": "ARROW",
    "{": "LBRACE",
    "}": "RBRACE",
    "[": "LBRACKET",
    "]": "RBRACKET",
    "(": "LPAREN",
    ")": "RPAREN",
    ",": "COMMA",
    ":": "COLON",
    ";": "SEMICOLON",
    "=": "EQUALS",
    "*": "STAR",
    "|": "BAR",
}

TOKEN_KINDS = frozenset(
    ["IDENTIFIER", "KEYWORD", "INTEGER", "STRING", "WORD"] + list(PUNCTUATION.values())
)

_TOKEN_RE = re.compile(
    r"""
    (?P<space>[ \t\r\n]+)
  | (?P<comment>(?://|\#)[^\n]*)
  | (?P<integer>-?\d+(?![\w-]))
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<word>[A-Za-z_][\w]*(?:-[\w]+)+'*)
  | (?P<identifier>[A-Za-z_][\w]*'*)
  | (?P<punct>->|[{}\[\](),:;=*|])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    """A lexeme with its kind and span.

    Args:
        kind (str): One of `TOKEN_KINDS`. WORD is a hyphenated name such as
            `add-component`.
        value (str or int): Keyword / identifier text, integer value or
            unquoted string.
        span (SourceSpan): Location.
    """

    kind: str
    value: object
    span: SourceSpan


def lex_error(span: SourceSpan, message: str, reference: Optional[str] = None):
    """Raise a `ParseError` at `span`."""
    raise ParseError(Diagnostic("error", message, span, reference))


def tokenize(text: str, file: str = "<string>", first_line: int = 1) -> list:
    """Split `text` into tokens, dropping whitespace and comments.

    Args:
        text (str): Source text.
        file (str): File name used in spans.
        first_line (int): Line number of the first line of `text`.

    Returns:
        list: Tokens.

    Raises:
        ParseError: On an unexpected character or unterminated string.
    """
    tokens = []
    line, column, pos = first_line, 1, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            span = SourceSpan(file, line, column, line, column)
            lex_error(span, f"unexpected character '{text[pos]}'")
        lexeme = match.group()
        end_line = line + lexeme.count("\n")
        if "\n" in lexeme:
            end_column = len(lexeme) - lexeme.rfind("\n")
        else:
            end_column = column + len(lexeme)
        span = SourceSpan(file, line, column, end_line, end_column - 1)
        kind = match.lastgroup
        if kind == "integer":
            tokens.append(Token("INTEGER", int(lexeme), span))
        elif kind == "string":
            value = re.sub(r"\\(.)", r"\1", lexeme[1:-1])
            tokens.append(Token("STRING", value, span))
        elif kind == "word":
            tokens.append(Token("WORD", lexeme, span))
        elif kind == "identifier":
            token_kind = "KEYWORD" if lexeme in KEYWORDS else "IDENTIFIER"
            tokens.append(Token(token_kind, lexeme, span))
        elif kind == "punct":
            tokens.append(Token(PUNCTUATION[lexeme], lexeme, span))
        line, column, pos = end_line, end_column, match.end()
    return tokens
