# core/group.py
"""
Subgrupo de ordem prima q de Z_p^*.
Validação/geração de parâmetros, aritmética de expoentes mod q,
produtos de elementos mod p e geração de chaves.
"""

import random
from dataclasses import dataclass
from typing import NewType, Optional

import gmpy2

from core.errors import (
    GenerationTimeout,
    NonInvertible,
    NotPrime,
    OrderMismatch,
    TrivialGenerator,
    ZeroSecret,
)
from core.logger import log_info
from core.settings import get_setting

Scalar = NewType("Scalar", int)
Element = NewType("Element", int)

SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151,
    157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233,
)


def default_rng() -> random.Random:
    return random.SystemRandom()


def is_probable_prime(n: int, rounds: Optional[int] = None) -> bool:
    """
    Divisão por primos pequenos seguida de Miller-Rabin (gmpy2).

    Args:
        n: Número a testar
        rounds: Rodadas de Miller-Rabin (padrão: settings.miller_rabin_rounds)
    """
    if n < 2:
        return False
    for sp in SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    return bool(gmpy2.is_prime(n, rounds or get_setting("miller_rabin_rounds")))


@dataclass(frozen=True)
class GroupParams:
    """Tripla pública (p, q, g) compartilhada por todos os esquemas."""

    p: int
    q: int
    g: int

    def scalar(self, value: int) -> Scalar:
        return Scalar(value % self.q)

    def element(self, value: int) -> Element:
        if not 1 <= value < self.p:
            raise ValueError(f"elemento fora de [1, p): {value}")
        return Element(value)

    def is_member(self, value: int) -> bool:
        return 1 <= value < self.p and pow(value, self.q, self.p) == 1

    def exp(self, base: int, e: int) -> Element:
        """base^e mod p; expoentes negativos valem q−e (bases de ordem q)."""
        if base % self.p == 0:
            raise ValueError("base nula não pertence ao grupo")
        return Element(pow(base, e % self.q, self.p))

    def gexp(self, e: int) -> Element:
        return self.exp(self.g, e)

    def mul(self, *elements: int) -> Element:
        """Produto de elementos mod p."""
        acc = 1
        for el in elements:
            acc = acc * el % self.p
        return Element(acc)

    def add(self, a: int, b: int) -> Scalar:
        return Scalar((a + b) % self.q)

    def sub(self, a: int, b: int) -> Scalar:
        return Scalar((a - b) % self.q)

    def smul(self, a: int, b: int) -> Scalar:
        return Scalar(a * b % self.q)

    def neg(self, a: int) -> Scalar:
        return Scalar(-a % self.q)

    def inv(self, a: int) -> Scalar:
        if a % self.q == 0:
            raise NonInvertible(f"{a} não é invertível mod {self.q}")
        return Scalar(pow(a, -1, self.q))

    def random_scalar(self, rng: Optional[random.Random] = None, nonzero: bool = True) -> Scalar:
        rng = rng or default_rng()
        return Scalar(rng.randrange(1 if nonzero else 0, self.q))

    def describe(self) -> str:
        return f"p={self.p.bit_length()} bits, q={self.q.bit_length()} bits"


@dataclass(frozen=True)
class KeyPair:
    x: Scalar
    y: Element


def validate_params(p: int, q: int, g: int) -> GroupParams:
    """
    Valida a tripla (p, q, g).

    Raises:
        NotPrime: p ou q composto
        OrderMismatch: q ∤ p−1, g fora de [1, p) ou g^q ≠ 1
        TrivialGenerator: g = 1
    """
    if not is_probable_prime(p):
        raise NotPrime("p", p)
    if not is_probable_prime(q):
        raise NotPrime("q", q)
    if (p - 1) % q != 0:
        raise OrderMismatch(f"q={q} não divide p−1={p - 1}")
    if g == 1:
        raise TrivialGenerator("g = 1 não gera o subgrupo")
    if not 1 < g < p:
        raise OrderMismatch(f"g={g} fora de (1, p)")
    if pow(g, q, p) != 1:
        raise OrderMismatch(f"g^q ≠ 1 mod p (g={g})")
    return GroupParams(p, q, g)


def _random_prime(bits: int, rng: random.Random, attempts: int) -> int:
    for _ in range(attempts):
        candidate = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(candidate):
            return candidate
    raise GenerationTimeout(f"nenhum primo de {bits} bits em {attempts} tentativas")


def generate_params(q_bits: int, p_bits: int, rng: Optional[random.Random] = None) -> GroupParams:
    """
    Gera (p, q, g) com p = k·q + 1 e g = α^((p−1)/q) ≠ 1.

    Args:
        q_bits: Tamanho de q (≥ 8)
        p_bits: Tamanho de p (> q_bits)
        rng: Fonte de aleatoriedade (random.Random com semente para reprodutibilidade)
    """
    if q_bits < 8:
        raise ValueError("q_bits deve ser ≥ 8")
    if p_bits <= q_bits:
        raise ValueError("p_bits deve exceder q_bits")

    rng = rng or default_rng()
    attempts = int(get_setting("generation_max_attempts"))
    q = _random_prime(q_bits, rng, attempts)

    k_low = -(-(1 << (p_bits - 1)) // q)
    k_high = ((1 << p_bits) - 2) // q
    if k_low > k_high:
        raise GenerationTimeout(f"sem espaço para p de {p_bits} bits com q de {q_bits} bits")

    for _ in range(attempts):
        k = rng.randint(k_low, k_high)
        k += k & 1
        p = k * q + 1
        if p.bit_length() != p_bits or not is_probable_prime(p):
            continue
        for _ in range(attempts):
            alpha = rng.randrange(2, p - 1)
            g = pow(alpha, (p - 1) // q, p)
            if g != 1:
                params = validate_params(p, q, g)
                log_info(f"[GRUPO] Parâmetros gerados ({params.describe()})")
                return params
        break

    raise GenerationTimeout(f"parâmetros de {p_bits}/{q_bits} bits não encontrados em {attempts} tentativas")


def keygen(params: GroupParams, rng: Optional[random.Random] = None, x: Optional[int] = None) -> KeyPair:
    """
    Par de chaves (x, y = g^x mod p).

    Raises:
        ZeroSecret: x fora de [1, q)
    """
    if x is None:
        x = params.random_scalar(rng)
    if not 1 <= x < params.q:
        raise ZeroSecret(f"chave secreta fora de [1, q): {x}")
    return KeyPair(Scalar(x), params.gexp(x))
