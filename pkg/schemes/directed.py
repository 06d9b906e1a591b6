# schemes/directed.py
"""
Assinatura dirigida (A assina para B; só B verifica), sua redesignação
para um terceiro C, a variante com verificação por limiar (k membros de
um grupo R) e o criptossistema de limiar construído sobre ela.
"""

import random
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

from core.errors import DecryptionMismatch, FixtureMiss
from core.group import Element, GroupParams, KeyPair, Scalar
from core.hashing import HashOracle
from core.logger import log_info, log_warning
from core.sharing import Share, check_points, modified_shadow, poly_random, unmask_share
from core.zk import ConfirmationTranscript, Statement, run_confirmation

TAG_DS = "ch1"
TAG_TV = "ch1-tv"
TAG_TC_KEY = "tc-key"
TAG_TC_STREAM = "tc-stream"
TAG_TC_MAC = "tc-mac"


@dataclass(frozen=True)
class DirectedSignature:
    S_A: Scalar
    W_B: Element
    V_B: Element
    m: bytes


@dataclass(frozen=True)
class ThresholdVerifySignature:
    S_A: Scalar
    W_R: Element
    shadows: Tuple[Tuple[int, int], ...]  # (u_i, v_{R_i})
    k: int
    m: bytes

    def shadow_of(self, u: int) -> int:
        return dict(self.shadows)[u]


@dataclass(frozen=True)
class ThresholdCiphertext:
    S_A: Scalar
    W_R: Element
    c: bytes
    tag: bytes
    shadows: Tuple[Tuple[int, int], ...]
    k: int

    def shadow_of(self, u: int) -> int:
        return dict(self.shadows)[u]


# ===== Assinatura dirigida básica =====

def ds_sign(params: GroupParams, signer: KeyPair, y_B: int, m: bytes,
            K1: int, K2: int, oracle: HashOracle) -> DirectedSignature:
    """
    W_B = g^{−K2}, V_B = g^{K1}·y_B^{K2}, r_A = h(g^{K1}, m), S_A = K1 + x_A·r_A.
    """
    W_B = params.gexp(-K2)
    g_k1 = params.gexp(K1)
    V_B = params.mul(g_k1, params.exp(y_B, K2))
    r_A = oracle(TAG_DS, [g_k1, m])
    S_A = params.add(K1, params.smul(signer.x, r_A))
    log_info("[CAP1] Assinatura dirigida gerada")
    return DirectedSignature(S_A, W_B, V_B, m)


def ds_recover(params: GroupParams, sig: DirectedSignature, x: int) -> Element:
    """R = V_B · W_B^x (só o receptor designado obtém g^{K1})."""
    return params.mul(sig.V_B, params.exp(sig.W_B, x))


def _schnorr_check(params: GroupParams, S: int, R: int, y: int, r: int) -> bool:
    return params.gexp(S) == params.mul(R, params.exp(y, r))


def ds_verify(params: GroupParams, sig: DirectedSignature, receiver: KeyPair,
              y_A: int, oracle: HashOracle) -> bool:
    """g^{S_A} ≟ R · y_A^{h(R, m)} com R recuperado pela chave do receptor."""
    R = ds_recover(params, sig, receiver.x)
    try:
        r_A = oracle(TAG_DS, [R, sig.m])
    except FixtureMiss as e:
        log_warning(f"[CAP1] Hash ausente ao verificar ({e}); assinatura rejeitada")
        return False
    ok = _schnorr_check(params, sig.S_A, R, y_A, r_A)
    log_info(f"[CAP1] Verificação dirigida: {'aceita' if ok else 'rejeitada'}")
    return ok


def ds_redesignate(params: GroupParams, sig: DirectedSignature, R: int,
                   y_C: int, K: int) -> DirectedSignature:
    """
    B repassa a assinatura a C: W_C = g^{−K}, V_C = R·y_C^K.

    Returns:
        DirectedSignature: mesma assinatura com (W_C, V_C) no lugar de (W_B, V_B)
    """
    W_C = params.gexp(-K)
    V_C = params.mul(R, params.exp(y_C, K))
    return replace(sig, W_B=W_C, V_B=V_C)


def ds_prove_validity(params: GroupParams, receiver: KeyPair, sig: DirectedSignature,
                      u: Optional[int] = None, v: Optional[int] = None,
                      alpha: Optional[int] = None,
                      rng: Optional[random.Random] = None) -> Tuple[Element, ConfirmationTranscript]:
    """
    B revela R e prova que log_{W_B}(R·V_B^{-1}) = log_g y_B, sem entregar x_B.

    Com R confirmado, qualquer um confere g^{S_A} ≟ R·y_A^{h(R, m)}.
    """
    R = ds_recover(params, sig, receiver.x)
    statement = Statement(sig.W_B, params.mul(R, params.exp(sig.V_B, -1)), params.g, receiver.y)
    return R, run_confirmation(params, statement, receiver.x, u, v, alpha, rng)


# ===== Verificação por limiar =====

def _deal_shadows(params: GroupParams, group: Sequence[Tuple[int, int]], k: int, K1: int, K2: int,
                  rng: Optional[random.Random], coeffs: Optional[Sequence[int]]):
    check_points([u for u, _ in group], params.q)
    if not 1 <= k <= len(group):
        raise ValueError(f"limiar k={k} inválido para grupo de {len(group)}")
    f_R = poly_random(K1, k - 1, params.q, rng, coeffs)
    shadows = tuple((u, f_R(u) * params.exp(y, K2) % params.p) for u, y in group)
    return params.gexp(-K2), shadows


def tv_sign(params: GroupParams, signer: KeyPair, group: Sequence[Tuple[int, int]], k: int,
            m: bytes, K1: int, K2: int, oracle: HashOracle,
            rng: Optional[random.Random] = None,
            coeffs: Optional[Sequence[int]] = None) -> ThresholdVerifySignature:
    """
    Assinatura verificável por quaisquer k membros do grupo [(u_i, y_i)].

    f_R tem grau k−1 e f_R(0) = K1; v_{R_i} = f_R(u_i)·y_i^{K2} mod p.
    """
    W_R, shadows = _deal_shadows(params, group, k, K1, K2, rng, coeffs)
    r_A = oracle(TAG_TV, [params.gexp(K1), m])
    S_A = params.add(K1, params.smul(signer.x, r_A))
    log_info(f"[CAP1] Assinatura para verificação por limiar ({k} de {len(group)})")
    return ThresholdVerifySignature(S_A, W_R, shadows, k, m)


def tv_member_partial(params: GroupParams, member: KeyPair, u_i: int, v_i: int,
                      W_R: int, subset: Sequence[int]) -> Element:
    """R_{R_i} = g^{MS_{R_i}}, com a sombra desmascarada pela chave do membro."""
    l = unmask_share(v_i, W_R, member.x, params)
    return params.gexp(modified_shadow(Share(u_i, l), subset, params.q))


def tv_combine_verify(params: GroupParams, partials: Sequence[int], sig: ThresholdVerifySignature,
                      y_A: int, oracle: HashOracle) -> bool:
    """R = ∏ R_{R_i}; g^{S_A} ≟ R · y_A^{h(R, m)}."""
    if len(partials) != sig.k:
        log_warning(f"[CAP1] Esperadas {sig.k} parciais, recebidas {len(partials)}")
        return False
    R = params.mul(*partials)
    try:
        r_A = oracle(TAG_TV, [R, sig.m])
    except FixtureMiss as e:
        log_warning(f"[CAP1] Hash ausente na combinação ({e}); assinatura rejeitada")
        return False
    ok = _schnorr_check(params, sig.S_A, R, y_A, r_A)
    log_info(f"[CAP1] Verificação por limiar: {'aceita' if ok else 'rejeitada'}")
    return ok


# ===== Criptossistema de limiar =====

def _keystream(oracle: HashOracle, K: int, length: int) -> bytes:
    out = bytearray()
    block = 0
    while len(out) < length:
        out += oracle.digest(TAG_TC_STREAM, [K, block])
        block += 1
    return bytes(out[:length])


def _xor(data: bytes, stream: bytes) -> bytes:
    return bytes(a ^ b for a, b in zip(data, stream))


def tc_encrypt(params: GroupParams, signer: KeyPair, group: Sequence[Tuple[int, int]], k: int,
               m: bytes, K1: int, K2: int, oracle: HashOracle,
               rng: Optional[random.Random] = None,
               coeffs: Optional[Sequence[int]] = None) -> ThresholdCiphertext:
    """
    c = E_K(m) com K = h(V_R), V_R = g^{K1}; difunde {S_A, W_R, c, tag, {v_{R_i}}}.
    """
    W_R, shadows = _deal_shadows(params, group, k, K1, K2, rng, coeffs)
    V_R = params.gexp(K1)
    K = oracle(TAG_TC_KEY, [V_R])
    c = _xor(m, _keystream(oracle, K, len(m)))
    tag = oracle.digest(TAG_TC_MAC, [K, m])
    r_A = oracle(TAG_TV, [V_R, m])
    S_A = params.add(K1, params.smul(signer.x, r_A))
    log_info(f"[CAP1] Mensagem cifrada para {k} de {len(group)} ({len(m)} bytes)")
    return ThresholdCiphertext(S_A, W_R, c, tag, shadows, k)


def tc_decrypt(params: GroupParams, partials: Sequence[int], bundle: ThresholdCiphertext,
               y_A: int, oracle: HashOracle) -> bytes:
    """
    R = ∏ R_{R_i}, K = h(R), m = D_K(c); confere a etiqueta e a assinatura de A.

    Raises:
        DecryptionMismatch: etiqueta ou assinatura não conferem
    """
    if len(partials) != bundle.k:
        raise DecryptionMismatch(f"esperadas {bundle.k} parciais, recebidas {len(partials)}")
    R = params.mul(*partials)
    K = oracle(TAG_TC_KEY, [R])
    m = _xor(bundle.c, _keystream(oracle, K, len(bundle.c)))
    if oracle.digest(TAG_TC_MAC, [K, m]) != bundle.tag:
        raise DecryptionMismatch("etiqueta de integridade não confere")
    if not _schnorr_check(params, bundle.S_A, R, y_A, oracle(TAG_TV, [R, m])):
        raise DecryptionMismatch("assinatura do remetente não confere")
    log_info(f"[CAP1] Mensagem decifrada ({len(m)} bytes)")
    return m
