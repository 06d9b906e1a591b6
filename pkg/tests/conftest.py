# tests/conftest.py
"""
Fixtures comuns: o grupo pequeno dos vetores (p=23, q=11, g=3) e um grupo
de 128 bits para os testes em que colisões acidentais mod q atrapalhariam.
"""

import os
import random
import sys
from typing import List

import pytest
from hypothesis import settings

# Mesmo ajuste de path do main.py: os pacotes ficam na raiz do projeto
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.group import GroupParams, generate_params, keygen, validate_params  # noqa: E402
from core.hashing import HashOracle  # noqa: E402

settings.register_profile("dev", max_examples=40, deadline=None)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))

# q = 2^61 − 1, p = k·q + 1 com 128 bits
MID_P = 0x80000000000000067FFFFFFFFFFFFFAD
MID_Q = 0x1FFFFFFFFFFFFFFF
MID_G = 0x6C14293C92E191333E2D11E750C6C2D1


@pytest.fixture(scope="session")
def tiny() -> GroupParams:
    return validate_params(23, 11, 3)


@pytest.fixture(scope="session")
def group() -> GroupParams:
    return validate_params(MID_P, MID_Q, MID_G)


@pytest.fixture(scope="session")
def small_groups() -> List[GroupParams]:
    """200 grupos com q de 16 bits: colisões mod q deixam de ser desprezíveis."""
    return [generate_params(16, 40, random.Random(f"pequeno:{i}")) for i in range(200)]


@pytest.fixture
def rng() -> random.Random:
    return random.Random(2024)


@pytest.fixture
def oracle(group):
    return HashOracle.standard(group.q)


@pytest.fixture
def make_key(group, rng):
    def _make():
        return keygen(group, rng)
    return _make
