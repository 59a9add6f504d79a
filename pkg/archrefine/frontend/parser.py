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
`parser.py`
Recursive-descent parser for architecture (`.arch`) files.

Grammar (informal):

    file        ::= { alphabet | channel | machine | invariant | component }
                    system
    alphabet    ::= 'alphabet' ID '=' ( '{' [ msg { ',' msg } ] '}'
                                      | 'range' INT | ID { '*' ID } )
    channel     ::= 'channel' ID { ',' ID } ':' ID
    machine     ::= 'machine' ID '=' behavior
                  | 'machine' ID '{' { table_item } '}'
    table_item  ::= ( 'inputs' | 'outputs' | 'chaotic' | 'states' ) ':' ids
                  | 'init' ':' ID
                  | 'emit' ID ':' assignments { '|' assignments }
                  | 'on' ID ':' guards '->' ID { ',' ID }
    invariant   ::= 'invariant' ID '=' ID '(' params ')'
    component   ::= 'component' ID '{' 'in' ':' ids 'out' ':' ids
                    ( 'behavior' ':' behavior | 'sub' '{' { component } system '}' ) '}'
    system      ::= 'system' '{' 'inputs' ':' ids 'outputs' ':' ids '}'
    behavior    ::= 'trivial' | ID | ID '(' params ')'
                  | 'adapt' '(' behavior { ',' ( 'in' | 'out' | 'chaotic' ) '=' list } ')'
                  | 'rename' '(' behavior { ',' ID '->' ID } ')'

Semicolons are optional separators; `//` and `#` start comments.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

from archrefine.behavior import (
    AdaptedMachine,
    MachineBehavior,
    RenamedMachine,
    TrivialBehavior,
)
from archrefine.constants import DEFAULT_INTERVAL_BOUND
from archrefine.errors import (
    ArchRefineError,
    ParseError,
    SourceSpan,
)
from archrefine.frontend.lexer import TOKEN_KINDS, Token, lex_error, tokenize
from archrefine.invariants.base import Invariant
from archrefine.machines.table import (
    EMPTY,
    EQUALS,
    HAS,
    IGNORE,
    NONEMPTY,
    Guard,
    TableMachine,
    Transition,
)
from archrefine.streams import Alphabet, Valuation
from archrefine.system import Component, System, as_component
from archrefine.utils import get_invariant_cls, get_machine_cls

LOGGER = logging.getLogger(__name__)


@dataclass
class Document:
    """Everything declared in an architecture file.

    Args:
        system (System): The system block with its components.
        alphabets (dict): Alphabet name to Alphabet.
        machines (dict): Named machines (`machine` declarations).
        invariants (dict): Named invariants.
        spans (dict): (kind, name) to SourceSpan, for diagnostics.
    """

    system: System
    alphabets: dict = field(default_factory=dict)
    machines: dict = field(default_factory=dict)
    invariants: dict = field(default_factory=dict)
    spans: dict = field(default_factory=dict)

    def span_of(self, kind: str, name: str) -> Optional[SourceSpan]:
        """Span of a declaration, if known."""
        return self.spans.get((kind, name))


class ParserBase:
    """Token cursor with `peek` / `match` helpers."""

    def __init__(self, tokens: list, file: str = "<string>"):
        self.tokens = tokens
        self.file = file
        self.pos = 0

    @property
    def nt(self) -> Optional[Token]:
        """Next token, None at end of input."""
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    @property
    def ct(self) -> Optional[Token]:
        """Last consumed token."""
        return self.tokens[self.pos - 1] if self.pos else None

    def here(self) -> SourceSpan:
        """Span of the next token (or of the end of input)."""
        if self.nt is not None:
            return self.nt.span
        if self.ct is not None:
            span = self.ct.span
            return SourceSpan(self.file, span.end_line, span.end_column + 1,
                              span.end_line, span.end_column + 1)
        return SourceSpan(self.file, 1, 1, 1, 1)

    def error(self, message: str, span: Optional[SourceSpan] = None, reference=None):
        """Raise a `ParseError` at `span` (defaults to the next token)."""
        lex_error(span or self.here(), message, reference)

    def peek(self, kind: str) -> bool:
        assert kind in TOKEN_KINDS
        return self.nt is not None and self.nt.kind == kind

    def peek_kw(self, value: str) -> bool:
        return self.peek("KEYWORD") and self.nt.value == value  # type: ignore[union-attr]

    def peek_eof(self) -> bool:
        return self.nt is None

    def advance(self) -> Token:
        token = self.nt
        if token is None:
            self.error("unexpected end of input")
        self.pos += 1
        return token  # type: ignore[return-value]

    def match(self, kind: str) -> Token:
        if self.nt is None:
            self.error(f"expected {kind}, encountered end of input instead")
        elif self.nt.kind != kind:
            self.error(f"expected {kind}, encountered {self.nt.kind} '{self.nt.value}' instead")
        return self.advance()

    def match_kw(self, value: str) -> Token:
        if not self.peek_kw(value):
            found = "end of input" if self.nt is None else f"'{self.nt.value}'"
            self.error(f"expected '{value}', encountered {found} instead")
        return self.advance()

    def skip(self, kind: str) -> bool:
        """Consume an optional token."""
        if self.peek(kind):
            self.advance()
            return True
        return False

    def match_name(self) -> Token:
        """An identifier or hyphenated word."""
        if self.peek("IDENTIFIER") or self.peek("WORD"):
            return self.advance()
        return self.match("IDENTIFIER")

    def match_names(self) -> list:
        """Possibly empty comma-separated identifier list."""
        names = []
        if self.peek("IDENTIFIER"):
            names.append(self.advance().value)
            while self.skip("COMMA"):
                names.append(self.match("IDENTIFIER").value)
        return names

    def match_list(self) -> list:
        """`[a, b]`."""
        self.match("LBRACKET")
        names = self.match_names()
        self.match("RBRACKET")
        return names

    def parse_message(self):
        """Message literal: identifier, integer, string or tuple."""
        if self.peek("INTEGER") or self.peek("STRING"):
            return self.advance().value
        if self.peek("IDENTIFIER") or self.peek("WORD"):
            return self.advance().value
        if self.skip("LPAREN"):
            items = [self.parse_message()]
            while self.skip("COMMA"):
                items.append(self.parse_message())
            self.match("RPAREN")
            return tuple(items)
        return self.error("expected a message")

    def parse_interval(self) -> tuple:
        """`[m, m, ...]`."""
        self.match("LBRACKET")
        messages = []
        if not self.peek("RBRACKET"):
            messages.append(self.parse_message())
            while self.skip("COMMA"):
                messages.append(self.parse_message())
        self.match("RBRACKET")
        return tuple(messages)

    def parse_value(self):
        """Parameter value: message, list or `true`."""
        if self.skip("LBRACKET"):
            values = []
            if not self.peek("RBRACKET"):
                values.append(self.parse_value())
                while self.skip("COMMA"):
                    values.append(self.parse_value())
            self.match("RBRACKET")
            return values
        if self.peek_kw("true"):
            self.advance()
            return True
        return self.parse_message()

    def parse_params(self) -> dict:
        """`(key=value, ...)` after a library name."""
        self.match("LPAREN")
        params: dict = {}
        while not self.peek("RPAREN"):
            key = self.match("IDENTIFIER")
            if key.value in params:
                self.error(f"duplicate parameter {key.value}", key.span)
            self.match("EQUALS")
            params[key.value] = self.parse_value()
            if not self.skip("COMMA"):
                break
        self.match("RPAREN")
        return params


class ExpressionParser(ParserBase):
    """Behavior and invariant expressions, resolved against named machines."""

    def __init__(self, tokens: list, file: str = "<string>", machines=None):
        super().__init__(tokens, file)
        self.machines: dict = dict(machines or {})

    def parse_behavior(self, allow_names: bool = True):
        """Parse a behavior expression.

        Returns:
            MachineBehavior, or the referenced name (str) when `allow_names`
            is set and the name is not a known machine.
        """
        start = self.here()
        if self.peek_kw("trivial"):
            self.advance()
            return TrivialBehavior()
        if self.peek_kw("adapt"):
            return self._parse_adapt()
        if self.peek_kw("rename"):
            return self._parse_rename()
        name = self.match("IDENTIFIER")
        if self.peek("LPAREN"):
            params = self.parse_params()
            return self._instantiate_machine(name, params)
        if name.value in self.machines:
            return self.machines[name.value]
        if allow_names:
            return name.value
        return self.error(f"unknown machine {name.value}", start)

    def _inner(self) -> MachineBehavior:
        inner = self.parse_behavior(allow_names=False)
        return inner

    def _parse_adapt(self) -> MachineBehavior:
        start = self.match_kw("adapt").span
        self.match("LPAREN")
        inner = self._inner()
        sets: dict = {}
        while self.skip("COMMA"):
            key = self.advance()
            if key.value not in ("in", "out", "chaotic"):
                self.error(f"unknown adapt argument {key.value}", key.span)
            self.match("EQUALS")
            sets[key.value] = self.match_list()
        self.match("RPAREN")
        try:
            return AdaptedMachine.make(
                inner,
                sets.get("in", inner.inputs),
                sets.get("out", inner.outputs),
                sets.get("chaotic", ()),
            )
        except ArchRefineError as exc:
            return self.error(str(exc), start)

    def _parse_rename(self) -> MachineBehavior:
        start = self.match_kw("rename").span
        self.match("LPAREN")
        inner = self._inner()
        mapping = {}
        while self.skip("COMMA"):
            old = self.match("IDENTIFIER").value
            self.match("ARROW")
            mapping[old] = self.match("IDENTIFIER").value
        self.match("RPAREN")
        try:
            return RenamedMachine.make(inner, mapping)
        except ArchRefineError as exc:
            return self.error(str(exc), start)

    def _instantiate_machine(self, name: Token, params: dict) -> MachineBehavior:
        cls = get_machine_cls(name.value)
        if cls is None:
            self.error(f"unknown machine library {name.value}", name.span)
        try:
            return cls.from_params(**params)
        except (TypeError, ValueError, ArchRefineError) as exc:
            return self.error(f"cannot instantiate {name.value}: {exc}", name.span)

    def parse_invariant(self, invariants=None, allow_names: bool = True):
        """`Lib(key=value, ...)` or the name of a declared invariant."""
        invariants = invariants or {}
        name = self.match("IDENTIFIER")
        if not self.peek("LPAREN"):
            if name.value in invariants:
                return invariants[name.value]
            if allow_names:
                return name.value
            return self.error(f"unknown invariant {name.value}", name.span)
        params = self.parse_params()
        cls = get_invariant_cls(name.value)
        if cls is None:
            self.error(f"unknown invariant library {name.value}", name.span)
        try:
            invariant: Invariant = cls.from_params(**params)
        except (TypeError, ValueError, ArchRefineError) as exc:
            return self.error(f"cannot instantiate {name.value}: {exc}", name.span)
        return invariant


class ArchitectureParser(ExpressionParser):
    """Parser of `.arch` files."""

    def __init__(self, text: str, file: str = "<string>", bound: int = DEFAULT_INTERVAL_BOUND):
        super().__init__(tokenize(text, file), file)
        self.bound = bound
        self.alphabets: dict = {}
        self.channels: dict = {}
        self.invariants: dict = {}
        self.spans: dict = {}

    def _declare(self, kind: str, name: Token):
        key = (kind, name.value)
        if key in self.spans:
            self.error(
                f"duplicate declaration of {kind} {name.value} "
                f"(first declared at {self.spans[key]})",
                name.span,
            )
        self.spans[key] = name.span

    def parse(self) -> Document:
        """Parse the whole file.

        Raises:
            ParseError: On syntax errors, duplicate declarations, unknown
                alphabets, undeclared channels or several system blocks.
        """
        components: list = []
        interface = None
        while not self.peek_eof():
            if self.peek_kw("alphabet"):
                self.parse_alphabet()
            elif self.peek_kw("channel"):
                self.parse_channel()
            elif self.peek_kw("machine"):
                self.parse_machine()
            elif self.peek_kw("invariant"):
                self.parse_invariant_decl()
            elif self.peek_kw("component"):
                components.append(self.parse_component())
            elif self.peek_kw("system"):
                start = self.here()
                if interface is not None:
                    self.error("multiple systems", start)
                interface = self.parse_system_block()
            else:
                self.error("expected a declaration")
            self.skip("SEMICOLON")
        if interface is None:
            self.error("missing system block")
        inputs, outputs, span = interface
        system = self._system(inputs, outputs, components)
        self.spans[("system", "system")] = span
        return Document(system, self.alphabets, self.machines, self.invariants, self.spans)

    def _system(self, inputs, outputs, components) -> System:
        channels = tuple(self.channels.items())
        return System(inputs, outputs, tuple(components), channels)

    def parse_alphabet(self):
        self.match_kw("alphabet")
        name = self.match("IDENTIFIER")
        self._declare("alphabet", name)
        self.match("EQUALS")
        if self.skip("LBRACE"):
            messages = []
            if not self.peek("RBRACE"):
                messages.append(self.parse_message())
                while self.skip("COMMA"):
                    messages.append(self.parse_message())
            self.match("RBRACE")
        elif self.peek_kw("range"):
            self.advance()
            messages = list(range(self.match("INTEGER").value))  # type: ignore[call-overload]
        else:
            factors = [self._alphabet_ref()]
            while self.skip("STAR"):
                factors.append(self._alphabet_ref())
            if len(factors) == 1:
                messages = list(factors[0].messages)
            else:
                messages = [()]
                for factor in factors:
                    messages = [m + (x,) for m in messages for x in factor.messages]
        try:
            self.alphabets[name.value] = Alphabet(name.value, tuple(messages))
        except ArchRefineError as exc:
            self.error(str(exc), name.span)

    def _alphabet_ref(self) -> Alphabet:
        token = self.match("IDENTIFIER")
        if token.value not in self.alphabets:
            self.error(f"unknown alphabet {token.value}", token.span)
        return self.alphabets[token.value]

    def parse_channel(self):
        self.match_kw("channel")
        names = [self.match("IDENTIFIER")]
        while self.skip("COMMA"):
            names.append(self.match("IDENTIFIER"))
        self.match("COLON")
        alphabet = self._alphabet_ref()
        for name in names:
            self._declare("channel", name)
            self.channels[name.value] = alphabet

    def parse_machine(self):
        self.match_kw("machine")
        name = self.match("IDENTIFIER")
        self._declare("machine", name)
        if self.skip("EQUALS"):
            self.machines[name.value] = self.parse_behavior(allow_names=False)
        else:
            self.machines[name.value] = self.parse_table(name)

    def parse_invariant_decl(self):
        self.match_kw("invariant")
        name = self.match("IDENTIFIER")
        self._declare("invariant", name)
        self.match("EQUALS")
        self.invariants[name.value] = self.parse_invariant(self.invariants, allow_names=False)

    def parse_table(self, name: Token) -> TableMachine:
        """`machine NAME { ... }` block."""
        self.match("LBRACE")
        sets: dict = {"inputs": [], "outputs": [], "chaotic": [], "states": []}
        initial = None
        emissions: dict = {}
        moves = []
        while not self.skip("RBRACE"):
            token = self.nt
            if token is None:
                self.error(f"unterminated machine {name.value}")
            if token.kind == "KEYWORD" and token.value in sets:
                self.advance()
                self.match("COLON")
                sets[token.value] = self.match_names()
            elif self.peek_kw("init"):
                self.advance()
                self.match("COLON")
                initial = self.match("IDENTIFIER").value
            elif self.peek_kw("emit"):
                self.advance()
                state = self.match("IDENTIFIER")
                if state.value in emissions:
                    self.error(f"state {state.value} emits twice", state.span)
                self.match("COLON")
                options = [self._assignments()]
                while self.skip("BAR"):
                    options.append(self._assignments())
                emissions[state.value] = tuple(options)
            elif self.peek_kw("on"):
                moves.append(self._transition())
            else:
                self.error("expected a machine item")
            self.skip("SEMICOLON")
        states = sets["states"] or [initial]
        try:
            return TableMachine(
                name.value,
                frozenset(sets["inputs"]),
                frozenset(sets["outputs"]),
                frozenset(sets["chaotic"]),
                tuple(states),
                initial if initial is not None else states[0],
                tuple(emissions.items()),
                tuple(moves),
            )
        except (ArchRefineError, IndexError, TypeError) as exc:
            return self.error(f"ill-formed machine {name.value}: {exc}", name.span)

    def _assignments(self) -> Valuation:
        values = {}
        if self.peek("IDENTIFIER"):
            while True:
                channel = self.match("IDENTIFIER").value
                self.match("EQUALS")
                values[channel] = self.parse_interval()
                if not self.skip("COMMA"):
                    break
        return Valuation(values)

    def _transition(self) -> Transition:
        self.match_kw("on")
        source = self.match("IDENTIFIER").value
        self.match("COLON")
        guards = []
        if self.peek_kw("true"):
            self.advance()
        else:
            guards.append(self._guard())
            while self.peek_kw("and"):
                self.advance()
                guards.append(self._guard())
        self.match("ARROW")
        targets = [self.match("IDENTIFIER").value]
        while self.skip("COMMA"):
            targets.append(self.match("IDENTIFIER").value)
        return Transition(source, tuple(guards), tuple(targets))

    def _guard(self) -> Guard:
        channel = self.match("IDENTIFIER").value
        if self.skip("EQUALS"):
            if self.peek("IDENTIFIER") and self.nt.value == "_":  # type: ignore[union-attr]
                self.advance()
                return Guard(channel, IGNORE)
            return Guard(channel, EQUALS, self.parse_interval())
        if self.peek_kw("empty"):
            self.advance()
            return Guard(channel, EMPTY)
        if self.peek_kw("nonempty"):
            self.advance()
            return Guard(channel, NONEMPTY)
        self.match_kw("has")
        return Guard(channel, HAS, self.parse_message())

    def parse_component(self, scope: Optional[set] = None) -> Component:
        """`component NAME { in: ..; out: ..; behavior: .. | sub { .. } }`."""
        self.match_kw("component")
        name = self.match("IDENTIFIER")
        if scope is None:
            self._declare("component", name)
        elif name.value in scope:
            self.error(f"duplicate declaration of component {name.value}", name.span)
        else:
            scope.add(name.value)
        self.match("LBRACE")
        inputs: list = []
        outputs: list = []
        behavior = None
        sub = None
        while not self.skip("RBRACE"):
            if self.peek_kw("in"):
                self.advance()
                self.match("COLON")
                inputs = self.match_names()
            elif self.peek_kw("out"):
                self.advance()
                self.match("COLON")
                outputs = self.match_names()
            elif self.peek_kw("behavior"):
                self.advance()
                self.match("COLON")
                behavior = self.parse_behavior(allow_names=False)
            elif self.peek_kw("sub"):
                self.advance()
                sub = self.parse_sub()
            else:
                self.error("expected 'in', 'out', 'behavior' or 'sub'")
            self.skip("SEMICOLON")
        self._check_declared(inputs + outputs, name.span)
        try:
            if sub is not None:
                if behavior is not None:
                    self.error(f"component {name.value} has both behavior and sub", name.span)
                component = as_component(sub, name.value, bound=self.bound)
                if component.inputs != frozenset(inputs) or component.outputs != frozenset(outputs):
                    self.error(
                        f"component {name.value} does not match its subarchitecture interface",
                        name.span,
                    )
                return component
            if behavior is None:
                self.error(f"component {name.value} has no behavior", name.span)
            return Component(name.value, frozenset(inputs), frozenset(outputs), behavior)
        except ArchRefineError as exc:
            if isinstance(exc, ParseError):
                raise
            return self.error(str(exc), name.span)

    def parse_sub(self) -> System:
        self.match("LBRACE")
        components = []
        interface = None
        scope: set = set()
        while not self.skip("RBRACE"):
            if self.peek_kw("component"):
                components.append(self.parse_component(scope))
            elif self.peek_kw("system"):
                if interface is not None:
                    self.error("multiple systems")
                interface = self.parse_system_block()
            else:
                self.error("expected 'component' or 'system'")
            self.skip("SEMICOLON")
        if interface is None:
            self.error("missing system block in sub")
        inputs, outputs, _ = interface
        return self._system(inputs, outputs, components).restrict_declarations()

    def parse_system_block(self) -> tuple:
        start = self.match_kw("system").span
        self.match("LBRACE")
        inputs: list = []
        outputs: list = []
        while not self.skip("RBRACE"):
            if self.peek_kw("inputs"):
                self.advance()
                self.match("COLON")
                inputs = self.match_names()
            elif self.peek_kw("outputs"):
                self.advance()
                self.match("COLON")
                outputs = self.match_names()
            else:
                self.error("expected 'inputs' or 'outputs'")
            self.skip("SEMICOLON")
        self._check_declared(inputs + outputs, start)
        return frozenset(inputs), frozenset(outputs), start.merge(self.ct.span)  # type: ignore[union-attr]

    def _check_declared(self, channels: list, span: SourceSpan):
        unknown = sorted(set(channels) - set(self.channels))
        if unknown:
            self.error(f"undeclared channels {unknown}", span)


def parse_document(text: str, file: str = "<string>", bound: int = DEFAULT_INTERVAL_BOUND) -> Document:
    """Parse an architecture file into a `Document`.

    Args:
        text (str): File content.
        file (str): File name for spans.
        bound (int): Interval bound of folded components' blackboxes.
    """
    LOGGER.debug(f"Parsing architecture {file}")
    return ArchitectureParser(text, file, bound).parse()


def parse_architecture(text: str, file: str = "<string>") -> System:
    """Parse an architecture file into a `System`.

    Parsing does not check consistency.

    Raises:
        ParseError: With a diagnostic carrying the span of the problem.
    """
    return parse_document(text, file).system

