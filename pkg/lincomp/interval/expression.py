"""Recursive-descent evaluator for interval expressions.

    expr    := term (('+' | '-') term)*
    term    := '~' term | '-' term | number '*' term | primary
    primary := '[' number ',' number ']'
             | 'gji' '(' expr ',' number ',' number ')'
             | ('meet_i' | 'join_i' | 'meet_m' | 'join_m') '(' expr ',' expr ')'
             | '(' expr ')'
    number  := ['+' | '-'] (decimal ['/' integer] | 'inf')

`-` is the true minus (group inverse), `~` the weak minus.
"""

import re
from typing import List, Tuple

from lincomp.errors import ParseError
from lincomp.services import pii_core
from lincomp.services.pii_core import PII
from lincomp.utils.validators import parse_number

TOKEN_PATTERN = re.compile(r'\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]+)|(.))')

BINARY_FUNCTIONS = {
    'meet_i': pii_core.info_meet,
    'join_i': pii_core.info_join,
    'meet_m': pii_core.material_meet,
    'join_m': pii_core.material_join,
}


def tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    position = 0
    text = text.rstrip()
    while position < len(text):
        match = TOKEN_PATTERN.match(text, position)
        if not match or match.end() == position:
            raise ParseError(f'unexpected input at position {position}')
        number, word, symbol = match.groups()
        if number is not None:
            tokens.append(('num', number))
        elif word is not None:
            tokens.append(('word', word))
        elif symbol is not None:
            if symbol not in '[](),+-~*/':
                raise ParseError(f'unexpected character {symbol!r}')
            tokens.append(('sym', symbol))
        position = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0

    def peek(self, offset: int = 0):
        position = self.index + offset
        return self.tokens[position] if position < len(self.tokens) else ('end', '')

    def take(self):
        token = self.peek()
        if token[0] == 'end':
            raise ParseError('unexpected end of expression')
        self.index += 1
        return token

    def expect(self, symbol: str):
        kind, value = self.take()
        if kind != 'sym' or value != symbol:
            raise ParseError(f'expected {symbol!r}, got {value!r}')

    def at_number(self) -> bool:
        kind, value = self.peek()
        if kind == 'num' or (kind == 'word' and value == 'inf'):
            return True
        if kind == 'sym' and value in '+-':
            next_kind, next_value = self.peek(1)
            return next_kind == 'num' or (next_kind == 'word' and next_value == 'inf')
        return False

    def number(self):
        sign = ''
        kind, value = self.peek()
        if kind == 'sym' and value in '+-':
            sign = value
            self.take()
        kind, value = self.take()
        if kind == 'word' and value == 'inf':
            return parse_number(sign + 'inf')
        if kind != 'num':
            raise ParseError(f'expected a number, got {value!r}')
        if self.peek() == ('sym', '/'):
            self.take()
            kind, denominator = self.take()
            if kind != 'num':
                raise ParseError('expected a denominator after "/"')
            value = f'{value}/{denominator}'
        return parse_number(sign + value)

    def expr(self) -> PII:
        value = self.term()
        while self.peek() in (('sym', '+'), ('sym', '-')):
            _, op = self.take()
            right = self.term()
            value = value + right if op == '+' else value - right
        return value

    def term(self) -> PII:
        kind, value = self.peek()
        if kind == 'sym' and value == '~':
            self.take()
            return pii_core.weak_minus(self.term())
        if self.peek(0)[0] == 'num' or (self.at_number() and self._scalar_ahead()):
            coefficient = self.number()
            self.expect('*')
            return pii_core.scale(coefficient, self.term())
        if kind == 'sym' and value == '-':
            self.take()
            return pii_core.true_minus(self.term())
        return self.primary()

    def _scalar_ahead(self) -> bool:
        # A signed number at term position is only legal as a scalar factor.
        saved = self.index
        try:
            self.number()
            return self.peek() == ('sym', '*')
        except ParseError:
            return False
        finally:
            self.index = saved

    def primary(self) -> PII:
        kind, value = self.take()
        if kind == 'sym' and value == '[':
            a = self.number()
            self.expect(',')
            b = self.number()
            self.expect(']')
            return PII(a, b)
        if kind == 'sym' and value == '(':
            inner = self.expr()
            self.expect(')')
            return inner
        if kind == 'word' and value == 'gji':
            self.expect('(')
            x = self.expr()
            self.expect(',')
            lower = self.number()
            self.expect(',')
            upper = self.number()
            self.expect(')')
            return pii_core.ginsberg_involution(x, lower, upper)
        if kind == 'word' and value in BINARY_FUNCTIONS:
            self.expect('(')
            x = self.expr()
            self.expect(',')
            y = self.expr()
            self.expect(')')
            return BINARY_FUNCTIONS[value](x, y)
        raise ParseError(f'unexpected token {value!r}')


def evaluate(text: str) -> PII:
    parser = _Parser(text)
    if not parser.tokens:
        raise ParseError('empty expression')
    result = parser.expr()
    if parser.peek()[0] != 'end':
        raise ParseError(f'trailing input starting at {parser.peek()[1]!r}')
    return result
