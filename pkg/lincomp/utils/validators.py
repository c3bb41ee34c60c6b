"""Input parsing and validation helpers shared by commands and storage."""

import math
import re
from fractions import Fraction
from typing import Tuple

from lincomp.errors import MalformedInput, ParseError

NUMBER_PATTERN = re.compile(r'^[+-]?(inf|\d+/\d+|(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)$')
PII_PATTERN = re.compile(r'^\[\s*([^,\[\]\s]+)\s*,\s*([^,\[\]\s]+)\s*\]$')
ATOM_PATTERN = re.compile(r'^[A-Za-z0-9_.:\-]+$')
CONTROL_CHARS = re.compile(r'[\x00-\x1f\x7f]')


def parse_number(token: str):
    """Parse a decimal, `p/q` rational or `inf` token; finite values become Fractions."""
    text = (token or '').strip()
    if not NUMBER_PATTERN.match(text):
        raise ParseError(f'not a number: {token!r}')
    if text.lstrip('+-') == 'inf':
        return -math.inf if text.startswith('-') else math.inf
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f'not a number: {token!r}') from exc


def _decimal_string(value: Fraction):
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    places = max(twos, fives)
    scaled = abs(value.numerator * 10 ** places // value.denominator)
    digits = str(scaled).rjust(places + 1, '0')
    sign = '-' if value < 0 else ''
    return f'{sign}{digits[:-places]}.{digits[-places:]}'


def format_number(value) -> str:
    """Canonical text for an endpoint or weight; parse_number reads it back exactly."""
    if isinstance(value, float):
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        if value.is_integer():
            return str(int(value))
        return repr(value)
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return _decimal_string(value) or f'{value.numerator}/{value.denominator}'
    return str(value)


def parse_pii(text: str):
    from lincomp.services.pii_core import PII

    match = PII_PATTERN.match((text or '').strip())
    if not match:
        raise ParseError(f'expected [a,b], got {text!r}')
    return PII(parse_number(match.group(1)), parse_number(match.group(2)))


def format_pii(x) -> str:
    return f'[{format_number(x.a)},{format_number(x.b)}]'


def validate_atom(atom: str) -> str:
    safe = CONTROL_CHARS.sub('', (atom or '').strip())
    if not ATOM_PATTERN.match(safe):
        raise MalformedInput(f'invalid atom id: {atom!r}')
    return safe


def validate_required_fields(payload: dict, required_fields: list) -> Tuple[bool, str]:
    for field in required_fields:
        value = payload.get(field)
        if value is None or (isinstance(value, str) and not value.strip()):
            return False, field
    return True, ''
