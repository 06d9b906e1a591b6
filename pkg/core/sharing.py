# core/sharing.py
"""
Compartilhamento de segredo de Shamir sobre Z_q.

Polinômios, avaliação de partes, pesos de Lagrange em qualquer ponto,
"sombras modificadas" (parte × peso de Lagrange em zero) e o transporte
mascarado v = l·y^K mod p com W = g^{−K}.
"""

import random
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from core.errors import DuplicatePoints, ShareOutOfRange, ZeroPoint
from core.group import Element, GroupParams, Scalar, default_rng


@dataclass(frozen=True)
class Polynomial:
    """f(x) = coeffs[0] + coeffs[1]·x + ... (mod q)."""

    coeffs: Tuple[int, ...]
    q: int

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("polinômio sem coeficientes")
        object.__setattr__(self, "coeffs", tuple(c % self.q for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def secret(self) -> Scalar:
        return Scalar(self.coeffs[0])

    def __call__(self, x: int) -> Scalar:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.q
        return Scalar(acc)

    def __str__(self) -> str:
        terms = []
        for power in range(self.degree, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            if power == 0:
                terms.append(str(c))
            elif power == 1:
                terms.append(f"{c}x")
            else:
                terms.append(f"{c}x^{power}")
        return " + ".join(terms) or "0"


@dataclass(frozen=True)
class Share:
    u: int
    value: Scalar


@dataclass(frozen=True)
class MaskedShare:
    v: int
    W: Element


def check_points(points: Iterable[int], q: int):
    """Pontos públicos não nulos e distintos mod q."""
    seen = set()
    for u in points:
        if u % q == 0:
            raise ZeroPoint(f"ponto público nulo mod {q}: {u}")
        if u % q in seen:
            raise DuplicatePoints(f"ponto repetido mod {q}: {u}")
        seen.add(u % q)


def poly_random(
    secret: int,
    degree: int,
    q: int,
    rng: Optional[random.Random] = None,
    coeffs: Optional[Sequence[int]] = None,
) -> Polynomial:
    """
    Polinômio de grau `degree` com f(0) = secret.

    Args:
        coeffs: Coeficientes fixos (vetores); coeffs[0] deve ser o segredo
    """
    if degree < 0:
        raise ValueError("grau negativo")
    if coeffs is not None:
        if len(coeffs) != degree + 1 or coeffs[0] % q != secret % q:
            raise ValueError("coeficientes fixos incompatíveis com segredo/grau")
        return Polynomial(tuple(coeffs), q)
    rng = rng or default_rng()
    return Polynomial((secret,) + tuple(rng.randrange(q) for _ in range(degree)), q)


def share_eval(f: Polynomial, u: int) -> Share:
    if u % f.q == 0:
        raise ZeroPoint("avaliação em u ≡ 0 revelaria f(0)")
    return Share(u, f(u))


def lagrange_weight(target: int, u_i: int, subset: Iterable[int], q: int) -> Scalar:
    """∏_{j≠i} (target − u_j)/(u_i − u_j) mod q."""
    subset = list(subset)
    if u_i not in subset:
        raise ValueError(f"{u_i} não pertence ao subconjunto")
    if len({u % q for u in subset}) != len(subset):
        raise DuplicatePoints(f"pontos repetidos mod {q} no subconjunto {subset}")
    num, den = 1, 1
    for u_j in subset:
        if u_j == u_i:
            continue
        num = num * (target - u_j) % q
        den = den * (u_i - u_j) % q
    return Scalar(num * pow(den, -1, q) % q)


def modified_shadow(share: Share, subset: Iterable[int], q: int) -> Scalar:
    return Scalar(share.value * lagrange_weight(0, share.u, subset, q) % q)


def reconstruct_at_zero(shares: Sequence[Share], q: int) -> Scalar:
    points = [s.u for s in shares]
    check_points(points, q)
    return Scalar(sum(modified_shadow(s, points, q) for s in shares) % q)


def _poly_mul(a: List[int], b: List[int], q: int) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] = (out[i + j] + ca * cb) % q
    return out


def interpolate(points: Sequence[Tuple[int, int]], q: int) -> Polynomial:
    """Coeficientes do polinômio interpolador (usado na montagem por subconjunto)."""
    xs = [x for x, _ in points]
    if len({x % q for x in xs}) != len(xs):
        raise DuplicatePoints("abscissas repetidas na interpolação")
    coeffs = [0] * len(points)
    for x_i, y_i in points:
        basis, den = [1], 1
        for x_j in xs:
            if x_j == x_i:
                continue
            basis = _poly_mul(basis, [-x_j % q, 1], q)
            den = den * (x_i - x_j) % q
        factor = y_i * pow(den, -1, q) % q
        for k, c in enumerate(basis):
            coeffs[k] = (coeffs[k] + c * factor) % q
    return Polynomial(tuple(coeffs), q)


def mask_share(l: int, y_holder: int, K: int, params: GroupParams) -> MaskedShare:
    """v = l·y^K mod p (inteiro mod p, não elemento do subgrupo), W = g^{−K}."""
    if not 0 <= l < params.q:
        raise ValueError(f"parte fora de [0, q): {l}")
    v = l * params.exp(y_holder, K) % params.p
    return MaskedShare(v, params.gexp(-K))


def unmask_share(v: int, W: int, x_holder: int, params: GroupParams) -> Scalar:
    """l = v·W^x mod p; exige l < q."""
    l = v * params.exp(W, x_holder) % params.p
    if l >= params.q:
        raise ShareOutOfRange(f"valor desmascarado {l} ≥ q={params.q}")
    return Scalar(l)
