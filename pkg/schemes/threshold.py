# schemes/threshold.py
"""
Assinaturas de limiar.

Cap. 3: t de n membros assinam para um receptor B (SDC distribui as
partes em canal secreto, combinador designado soma as parciais).
Cap. 4: t membros do grupo S assinam e k membros do grupo R verificam;
um centro comum (CTC) mascara as partes para o canal público.
"""

import random
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

from core.errors import FixtureMiss
from core.group import Element, GroupParams, KeyPair, Scalar, default_rng
from core.hashing import HashOracle
from core.logger import log_info, log_warning
from core.sharing import (
    Polynomial,
    Share,
    check_points,
    mask_share,
    modified_shadow,
    poly_random,
    share_eval,
    unmask_share,
)
from core.zk import ConfirmationTranscript, Statement, run_confirmation
from schemes.envelope import GroupSignature, aggregate, check_envelope, ms_commit, ms_envelope

TAG_CH3 = "ch3"
TAG_CH4 = "ch4"


# ===== Cap. 3 =====

@dataclass(frozen=True)
class Ch3Setup:
    poly: Polynomial          # só o SDC conhece
    y_G: Element
    shares: Dict[int, Share]  # u_i → f(u_i), entregue em canal secreto
    t: int


@dataclass(frozen=True)
class Ch3Commitment:
    w: Element  # público
    z: Element  # secreto entre os signatários


@dataclass(frozen=True)
class Ch3Signature:
    S: Scalar
    W: Element
    R: Scalar
    m: bytes


def ch3_setup(params: GroupParams, points: Sequence[int], t: int,
              rng: Optional[random.Random] = None,
              coeffs: Optional[Sequence[int]] = None) -> Ch3Setup:
    """
    SDC escolhe f de grau t−1, publica y_G = g^{f(0)} e entrega f(u_i).

    Args:
        coeffs: Polinômio fixo (vetores); senão f(0) e demais coeficientes aleatórios
    """
    check_points(points, params.q)
    if not 1 <= t <= len(points):
        raise ValueError(f"limiar t={t} inválido para {len(points)} membros")
    secret = coeffs[0] if coeffs is not None else params.random_scalar(rng or default_rng())
    poly = poly_random(secret, t - 1, params.q, rng, coeffs)
    shares = {u: share_eval(poly, u) for u in points}
    log_info(f"[CAP3] Grupo configurado: {t} de {len(points)}")
    return Ch3Setup(poly, params.gexp(poly.secret), shares, t)


def ch3_partial_commit(params: GroupParams, y_B: int, K1: int, K2: int) -> Ch3Commitment:
    """w_i = g^{K2−K1}, z_i = y_B^{K2}."""
    return Ch3Commitment(params.gexp(K2 - K1), params.exp(y_B, K2))


def ch3_aggregate(params: GroupParams, commits: Sequence[Ch3Commitment], m: bytes,
                  oracle: HashOracle) -> Tuple[Element, Element, Scalar]:
    """W = ∏ w_i, Z = ∏ z_i (mod p), R = h(Z, W, m)."""
    W = params.mul(*(c.w for c in commits))
    Z = params.mul(*(c.z for c in commits))
    return W, Z, oracle(TAG_CH3, [Z, W, m])


def ch3_partial_sign(params: GroupParams, share: Share, subset: Sequence[int],
                     K1: int, R: int) -> Tuple[Scalar, Scalar]:
    """
    s_i = K_{i1} − MS_i·R mod q.

    Returns:
        (MS_i, s_i)
    """
    MS = modified_shadow(share, subset, params.q)
    return MS, params.sub(K1, params.smul(MS, R))


def ch3_combine(params: GroupParams, partials: Sequence[int]) -> Scalar:
    return Scalar(sum(partials) % params.q)


def ch3_recover(params: GroupParams, sig: Ch3Signature, y_G: int, x_B: int) -> Tuple[Element, Element]:
    """μ = g^S·y_G^R·W e Z = μ^{x_B}."""
    mu = params.mul(params.gexp(sig.S), params.exp(y_G, sig.R), sig.W)
    return mu, params.exp(mu, x_B)


def ch3_verify(params: GroupParams, sig: Ch3Signature, receiver: KeyPair, y_G: int,
               oracle: HashOracle) -> bool:
    _, Z = ch3_recover(params, sig, y_G, receiver.x)
    try:
        ok = oracle(TAG_CH3, [Z, sig.W, sig.m]) == sig.R
    except FixtureMiss as e:
        log_warning(f"[CAP3] Hash ausente ao verificar ({e}); assinatura rejeitada")
        ok = False
    log_info(f"[CAP3] Verificação pelo receptor: {'aceita' if ok else 'rejeitada'}")
    return ok


def ch3_prove_validity(params: GroupParams, receiver: KeyPair, sig: Ch3Signature, y_G: int,
                       u: Optional[int] = None, v: Optional[int] = None,
                       alpha: Optional[int] = None,
                       rng: Optional[random.Random] = None) -> ConfirmationTranscript:
    """B prova que log_μ Z = log_g y_B."""
    mu, Z = ch3_recover(params, sig, y_G, receiver.x)
    return run_confirmation(params, Statement(mu, Z, params.g, receiver.y), receiver.x, u, v, alpha, rng)


# ===== Cap. 4 =====

@dataclass(frozen=True)
class MaskedGroup:
    poly: Polynomial          # só o CTC conhece
    public_key: Element
    t: int
    masked: Dict[int, int]    # u_i → v_i = f(u_i)·y_i^K mod p
    W: Element


@dataclass(frozen=True)
class Ch4Setup:
    signing: MaskedGroup
    verifying: MaskedGroup


def _masked_group(params: GroupParams, roster: Sequence[Tuple[int, int]], t: int,
                  poly: Polynomial, K: int) -> MaskedGroup:
    masked = {}
    W = params.gexp(-K)
    for u, y in roster:
        masked[u] = mask_share(share_eval(poly, u).value, y, K, params).v
    return MaskedGroup(poly, params.gexp(poly.secret), t, masked, W)


def ch4_setup(params: GroupParams,
              signers: Sequence[Tuple[int, int]], t: int,
              verifiers: Sequence[Tuple[int, int]], k: int,
              K: Optional[int] = None,
              rng: Optional[random.Random] = None,
              coeffs_S: Optional[Sequence[int]] = None,
              coeffs_R: Optional[Sequence[int]] = None) -> Ch4Setup:
    """
    CTC cria f_S (grau t−1) e f_R (grau k−1) e publica {v_i, W} com K comum.

    Args:
        signers / verifiers: [(u_i, y_i)] de cada organização
    """
    rng = rng or default_rng()
    check_points([u for u, _ in signers], params.q)
    check_points([u for u, _ in verifiers], params.q)
    if not 1 <= t <= len(signers) or not 1 <= k <= len(verifiers):
        raise ValueError("limiares incompatíveis com os grupos")
    K = params.random_scalar(rng) if K is None else K
    x_S = coeffs_S[0] if coeffs_S is not None else params.random_scalar(rng)
    x_R = coeffs_R[0] if coeffs_R is not None else params.random_scalar(rng)
    f_S = poly_random(x_S, t - 1, params.q, rng, coeffs_S)
    f_R = poly_random(x_R, k - 1, params.q, rng, coeffs_R)
    log_info(f"[CAP4] CTC configurou S ({t} de {len(signers)}) e R ({k} de {len(verifiers)})")
    return Ch4Setup(_masked_group(params, signers, t, f_S, K), _masked_group(params, verifiers, k, f_R, K))


def ch4_member_shadow(params: GroupParams, member: KeyPair, u: int, v: int, W: int,
                      subset: Sequence[int]) -> Scalar:
    """Desmascara f(u_i) = v·W^{x_i} e aplica o peso de Lagrange do subconjunto."""
    l = unmask_share(v, W, member.x, params)
    return modified_shadow(Share(u, l), subset, params.q)


def ch4_partial_sign(params: GroupParams, MS: int, K1: int, R_S: int) -> Scalar:
    """s_i = K_{i1} + MS_{S_i}·R_S mod q."""
    return params.add(K1, params.smul(MS, R_S))


def ch4_sign(params: GroupParams, group: MaskedGroup, members: Mapping[int, KeyPair],
             subset: Sequence[int], y_R: int, m: bytes,
             nonces: Mapping[int, Tuple[int, int]], oracle: HashOracle) -> GroupSignature:
    """
    Sessão completa do grupo S num só processo (o harness faz o mesmo por mensagens).
    """
    if len(subset) != group.t:
        raise ValueError(f"são necessários {group.t} signatários, recebidos {len(subset)}")
    commits = [ms_commit(params, y_R, *nonces[u]) for u in subset]
    U, V, W = aggregate(params, commits)
    R_S = oracle(TAG_CH4, [V, m])
    S_S = 0
    for u in subset:
        MS = ch4_member_shadow(params, members[u], u, group.masked[u], group.W, subset)
        S_S += ch4_partial_sign(params, MS, nonces[u][0], R_S)
    log_info(f"[CAP4] Assinatura de grupo emitida por {len(subset)} membros")
    return ms_envelope(S_S % params.q, U, W, m, subset=list(subset))


def ch4_verify(params: GroupParams, sig: GroupSignature, shadows: Sequence[int], k: int,
               y_S: int, oracle: HashOracle) -> bool:
    """
    R_R = W_S·U_S^{Σ MS_{R_i}}; g^{S_S} ≟ R_R·y_S^{R_S}.

    Args:
        shadows: MS_{R_i} de exatamente k verificadores
    """
    if len(shadows) != k:
        log_warning(f"[CAP4] Esperadas {k} sombras de verificação, recebidas {len(shadows)}")
        return False
    R_R = params.mul(sig.W_S, params.exp(sig.U_S, sum(shadows)))
    ok = check_envelope(params, sig, R_R, y_S, TAG_CH4, oracle)
    log_info(f"[CAP4] Verificação pelo grupo R: {'aceita' if ok else 'rejeitada'}")
    return ok
