# schemes/envelope.py
"""
Envelope de assinatura de grupo {S_S, U_S, W_S, m} comum aos capítulos 4 a 7:
compromissos por membro, agregação pelo combinador, soma das parciais
com verificação individual (rastreabilidade) e prova de validade.
"""

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Mapping, Optional, Sequence, Tuple

from core.errors import FixtureMiss, PartialRejected
from core.group import Element, GroupParams, KeyPair, Scalar
from core.hashing import HashOracle
from core.logger import log_info, log_warning
from core.zk import ConfirmationTranscript, Statement, run_confirmation


@dataclass(frozen=True)
class Commitment:
    u: Element  # g^{−K_{i2}}, público
    v: Element  # g^{K_{i1}}, só entre signatários
    w: Element  # g^{K_{i1}}·y_R^{K_{i2}}, público


@dataclass(frozen=True)
class GroupSignature:
    S_S: Scalar
    U_S: Element
    W_S: Element
    m: bytes
    # públicos que o receptor precisa (subconjunto, n_i, pesos ...)
    attachments: Dict[str, Any] = field(default_factory=dict, compare=False)


def ms_commit(params: GroupParams, y_R: int, K1: int, K2: int) -> Commitment:
    """u_i = g^{−K2}, v_i = g^{K1}, w_i = g^{K1}·y_R^{K2} (y_R: chave do receptor/grupo R)."""
    v = params.gexp(K1)
    return Commitment(params.gexp(-K2), v, params.mul(v, params.exp(y_R, K2)))


def aggregate(params: GroupParams, commits: Sequence[Commitment]) -> Tuple[Element, Element, Element]:
    """(U_S, V_S, W_S) = produtos mod p dos compromissos."""
    U = params.mul(*(c.u for c in commits))
    V = params.mul(*(c.v for c in commits))
    W = params.mul(*(c.w for c in commits))
    return U, V, W


def ms_partial_sign(params: GroupParams, share: int, weight: int, K1: int, R_S: int) -> Tuple[Scalar, Scalar]:
    """
    MS_i = share·weight; s_i = K_{i1} + MS_i·R_S mod q.

    Returns:
        (MS_i, s_i)
    """
    MS = params.smul(share, weight)
    return MS, params.add(K1, params.smul(MS, R_S))


def ms_combine(params: GroupParams, partials: Mapping[Hashable, int],
               checker: Optional[Callable[[Hashable, int], bool]] = None) -> Scalar:
    """
    S_S = Σ s_i mod q; com `checker`, cada parcial é conferida antes.

    Raises:
        PartialRejected: primeira parcial reprovada (identifica o signatário)
    """
    if checker is not None:
        for signer, s_i in partials.items():
            if not checker(signer, s_i):
                log_warning(f"[DC] Parcial de {signer} reprovada; assinatura não emitida")
                raise PartialRejected(signer)
    return Scalar(sum(partials.values()) % params.q)


def ms_envelope(S_S: int, U_S: int, W_S: int, m: bytes, **attachments: Any) -> GroupSignature:
    return GroupSignature(Scalar(S_S), Element(U_S), Element(W_S), m, dict(attachments))


def receiver_recover(params: GroupParams, sig: GroupSignature, x_R: int) -> Element:
    """R_R = W_S · U_S^{x_R} (= V_S quando todos são honestos)."""
    return params.mul(sig.W_S, params.exp(sig.U_S, x_R))


def check_envelope(params: GroupParams, sig: GroupSignature, R_R: int, key: int,
                   tag: str, oracle: HashOracle, V_K: int = 1) -> bool:
    """
    V_K^{R_S}·g^{S_S} ≟ R_R·key^{R_S}, com R_S = h(R_R, m).

    key é y_S (cap. 4 e 7) ou E·y_S (cap. 5 e 6); V_K = 1 fora do cap. 7.
    Também serve ao terceiro que recebe R_R revelado pelo receptor.
    """
    try:
        R_S = oracle(tag, [R_R, sig.m])
    except FixtureMiss as e:
        log_warning(f"[ENVELOPE] Hash ausente ao verificar ({e}); assinatura rejeitada")
        return False
    left = params.mul(params.exp(V_K, R_S), params.gexp(sig.S_S))
    return left == params.mul(R_R, params.exp(key, R_S))


def ms_prove_validity(params: GroupParams, receiver: KeyPair, sig: GroupSignature,
                      u: Optional[int] = None, v: Optional[int] = None,
                      alpha: Optional[int] = None,
                      rng: Optional[random.Random] = None) -> ConfirmationTranscript:
    """R prova ao terceiro que log_{U_S} μ = log_g y_R, com μ = U_S^{x_R}."""
    mu = params.exp(sig.U_S, receiver.x)
    statement = Statement(sig.U_S, mu, params.g, receiver.y)
    transcript = run_confirmation(params, statement, receiver.x, u, v, alpha, rng)
    log_info(f"[ZK] Prova de validade do envelope: {'aceita' if transcript.accepted else 'rejeitada'}")
    return transcript
