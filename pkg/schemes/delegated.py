# schemes/delegated.py
"""
Delegação de assinatura (A → procurador B) e assinatura dirigida pelo
procurador para o receptor C, com prova de validade a um terceiro Y.

Fase off-line (independe da mensagem):
    A: r_A = g^{k_A}          B: r = g^α·r_A (r mod q ≠ 0)
    A: s_A = x_A·r + k_A      B: S = s_A + α, aceita se g^S = y_A^r·r
"""

import random
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from core.errors import DelegationCheckFailed, FixtureMiss, ProtocolOrderError
from core.group import Element, GroupParams, KeyPair, Scalar, default_rng
from core.hashing import HashOracle
from core.logger import log_info, log_warning
from core.settings import get_setting
from core.zk import ConfirmationTranscript, Statement, run_confirmation

TAG = "ch2"


@dataclass(frozen=True)
class ProxyKey:
    S: Scalar   # chave de assinatura do procurador
    r: Element  # ficha pública de delegação


@dataclass(frozen=True)
class ProxyDirectedSignature:
    S_B: Scalar
    W_B: Element
    r_B: Scalar
    r: Element
    m: bytes


def del_commit(params: GroupParams, k_A: int) -> Element:
    return params.gexp(k_A)


def del_blind(params: GroupParams, r_A: int, alpha: Optional[int] = None,
              rng: Optional[random.Random] = None) -> Tuple[Element, Scalar]:
    """
    r = g^α·r_A, sorteando novo α enquanto r mod q = 0.

    Returns:
        (r, α) efetivamente usados
    """
    rng = rng or default_rng()
    if alpha is None:
        alpha = params.random_scalar(rng, nonzero=False)
    for _ in range(int(get_setting("blind_max_retries"))):
        r = params.mul(params.gexp(alpha), r_A)
        if r % params.q != 0:
            return r, params.scalar(alpha)
        log_warning("[CAP2] r ≡ 0 mod q; sorteando novo α")
        alpha = params.random_scalar(rng, nonzero=False)
    raise DelegationCheckFailed("não foi possível obter r mod q ≠ 0")


def del_sign(params: GroupParams, original: KeyPair, k_A: int, r: int) -> Scalar:
    """s_A = x_A·(r mod q) + k_A mod q."""
    return params.add(params.smul(original.x, r), k_A)


def del_accept(params: GroupParams, s_A: int, alpha: int, y_A: int, r: int) -> ProxyKey:
    """
    S = s_A + α; aceita se g^S ≡ y_A^r · r mod p.

    Raises:
        DelegationCheckFailed: a chave recebida não confere
    """
    S = params.add(s_A, alpha)
    if params.gexp(S) != params.mul(params.exp(y_A, r), r):
        raise DelegationCheckFailed("g^S ≠ y_A^r · r mod p")
    log_info("[CAP2] Delegação aceita pelo procurador")
    return ProxyKey(S, params.element(r))


class DelegationPhase(Enum):
    START = "start"
    COMMITTED = "committed"
    BLINDED = "blinded"
    SIGNED = "signed"
    ACCEPTED = "accepted"


class DelegationSession:
    """Sessão de delegação com ordem de mensagens imposta."""

    def __init__(self, params: GroupParams, y_A: int):
        self.params = params
        self.y_A = y_A
        self.phase = DelegationPhase.START
        self.r_A: Optional[int] = None
        self.r: Optional[int] = None
        self.s_A: Optional[int] = None
        self._k_A: Optional[int] = None
        self._alpha: Optional[int] = None
        self.proxy_key: Optional[ProxyKey] = None

    def _advance(self, expected: DelegationPhase, to: DelegationPhase):
        if self.phase is not expected:
            raise ProtocolOrderError(f"delegação em {self.phase.value}, esperado {expected.value}")
        self.phase = to

    def commit(self, k_A: int) -> Element:
        self._advance(DelegationPhase.START, DelegationPhase.COMMITTED)
        self._k_A = k_A
        self.r_A = del_commit(self.params, k_A)
        return self.r_A

    def blind(self, alpha: Optional[int] = None, rng: Optional[random.Random] = None) -> Element:
        self._advance(DelegationPhase.COMMITTED, DelegationPhase.BLINDED)
        self.r, self._alpha = del_blind(self.params, self.r_A, alpha, rng)
        return self.r

    def sign(self, original: KeyPair) -> Scalar:
        self._advance(DelegationPhase.BLINDED, DelegationPhase.SIGNED)
        self.s_A = del_sign(self.params, original, self._k_A, self.r)
        return self.s_A

    def accept(self, s_A: Optional[int] = None) -> ProxyKey:
        self._advance(DelegationPhase.SIGNED, DelegationPhase.ACCEPTED)
        received = self.s_A if s_A is None else s_A
        self.proxy_key = del_accept(self.params, received, self._alpha, self.y_A, self.r)
        return self.proxy_key


def pd_sign(params: GroupParams, proxy: ProxyKey, y_C: int, m: bytes,
            K1: int, K2: int, oracle: HashOracle) -> ProxyDirectedSignature:
    """
    W_B = g^{K1−K2}, Z_C = y_C^{K1}, r_B = h(Z_C, W_B, m), S_B = K2 − S·r_B.
    """
    W_B = params.gexp(K1 - K2)
    Z_C = params.exp(y_C, K1)
    r_B = oracle(TAG, [Z_C, W_B, m])
    S_B = params.sub(K2, params.smul(proxy.S, r_B))
    log_info("[CAP2] Assinatura dirigida do procurador gerada")
    return ProxyDirectedSignature(S_B, W_B, r_B, proxy.r, m)


def pd_mu(params: GroupParams, sig: ProxyDirectedSignature, y_A: int) -> Element:
    """μ = g^{S_B}·(y_A^r·r)^{r_B}·W_B (só valores públicos)."""
    delegation = params.mul(params.exp(y_A, sig.r), sig.r)
    return params.mul(params.gexp(sig.S_B), params.exp(delegation, sig.r_B), sig.W_B)


def pd_verify(params: GroupParams, sig: ProxyDirectedSignature, receiver: KeyPair,
              y_A: int, oracle: HashOracle) -> Tuple[bool, Element, Element]:
    """
    C calcula μ e Z_C = μ^{x_C} e confere r_B = h(Z_C, W_B, m).

    Returns:
        (aceita, μ, Z_C); μ e Z_C alimentam a prova de validade
    """
    mu = pd_mu(params, sig, y_A)
    Z = params.exp(mu, receiver.x)
    try:
        ok = oracle(TAG, [Z, sig.W_B, sig.m]) == sig.r_B
    except FixtureMiss as e:
        log_warning(f"[CAP2] Hash ausente ao verificar ({e}); assinatura rejeitada")
        ok = False
    log_info(f"[CAP2] Verificação pelo receptor: {'aceita' if ok else 'rejeitada'}")
    return ok, mu, Z


def pd_third_party_precheck(params: GroupParams, sig: ProxyDirectedSignature, y_A: int,
                            Z: int, oracle: HashOracle) -> Tuple[bool, Element]:
    """Y recalcula μ e confere o hash com o Z_C revelado pelo receptor."""
    mu = pd_mu(params, sig, y_A)
    try:
        return oracle(TAG, [Z, sig.W_B, sig.m]) == sig.r_B, mu
    except FixtureMiss:
        return False, mu


def pd_prove_validity(params: GroupParams, receiver: KeyPair, mu: int, Z: int,
                      u: Optional[int] = None, v: Optional[int] = None,
                      alpha: Optional[int] = None,
                      rng: Optional[random.Random] = None) -> ConfirmationTranscript:
    """C prova a Y que log_μ Z_C = log_g y_C."""
    statement = Statement(mu, Z, params.g, receiver.y)
    return run_confirmation(params, statement, receiver.x, u, v, alpha, rng)
