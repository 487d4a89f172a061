"""Shared fixtures: field tables, small codes with empty cores, codewords."""

import logging

import numpy as np
import pytest

from gfqc.application.services.codec import back_substitute
from gfqc.application.services.construction import build_code
from gfqc.application.services.peeling import leaf_removal
from gfqc.config import get_settings
from gfqc.infrastructure.services.field import field_tables


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def gf4():
    return field_tables(2)


@pytest.fixture
def gf16():
    return field_tables(4)


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached per process; tests that patch the environment need a reload."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
    logging.getLogger("gfqc").setLevel(logging.NOTSET)


def _reduced_code(n_sym: int, m_base: int, p: int, b: int, construction: str = "peg"):
    for seed in range(50):
        code = build_code(n_sym, m_base, p, seed, b, construction)
        order = leaf_removal(code)
        if order.is_empty_core:
            return code, order
    raise RuntimeError("no seed gave an empty core")


@pytest.fixture(scope="session")
def small_code():
    """2-reduced GF(4) PEG code with 30 symbols and its leaf-removal order."""
    return _reduced_code(30, 15, 2, 2)


@pytest.fixture(scope="session")
def gf64_code():
    """1-reduced GF(64) PEG code at rate 0.5 with 40 symbols."""
    return _reduced_code(40, 20, 6, 1)


@pytest.fixture
def random_codeword():
    """Draws a uniformly random codeword of ``(code, order)``."""

    def draw(code, order, generator):
        info = generator.integers(0, code.q, size=len(order.info_set))
        return back_substitute(code, order, info, field_tables(code.p))

    return draw
