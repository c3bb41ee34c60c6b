"""Shared fixtures: seeded random generators, exact PII factories and a CLI runner."""

import io
import logging
from fractions import Fraction

import numpy as np
import pytest

from lincomp import create_cli
from lincomp.services.pii_core import PII


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def rational(rng):
    """Random Fraction with a small denominator, in [-bound, bound]."""

    def make(bound: int = 20) -> Fraction:
        return Fraction(int(rng.integers(-bound * 12, bound * 12 + 1)), int(rng.integers(1, 13)))

    return make


@pytest.fixture
def random_pii(rational):
    def make(bound: int = 20) -> PII:
        return PII(rational(bound), rational(bound))

    return make


@pytest.fixture
def run_cli(monkeypatch):
    """Run the command-line front end in-process; returns (exit_code, stdout, stderr)."""
    monkeypatch.setenv('LINCOMP_LOG_LEVEL', 'WARNING')
    cli = create_cli()

    def run(*argv):
        out, err = io.StringIO(), io.StringIO()
        code = cli.main([str(arg) for arg in argv], out=out, err=err)
        return code, out.getvalue(), err.getvalue()

    yield run
    logging.getLogger('lincomp').handlers.clear()


@pytest.fixture
def write_file(tmp_path):
    def write(name: str, text: str):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return path

    return write
