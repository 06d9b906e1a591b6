# schemes/multisig.py
"""
Multiassinaturas dirigidas de limiar (cap. 5 a 7).

Cap. 5: SDC distribui partes compostas l_i = K_i + f_S(u_i) e publica
        m_i = g^{l_i}, n_i = g^{K_i}; o combinador confere cada parcial.
Cap. 6: sem SDC; cada membro é o distribuidor do próprio polinômio f_i.
Cap. 7: polinômio por subconjunto autorizado, com chave de verificação V_K.

Os três produzem o envelope {S_S, U_S, W_S, m} de schemes/envelope.py.
"""

import random
from dataclasses import dataclass
from typing import Dict, Hashable, Mapping, Optional, Sequence, Tuple

from core.errors import ProtocolError, SubsetPointCollision
from core.group import Element, GroupParams, KeyPair, Scalar, default_rng
from core.hashing import HashOracle
from core.logger import log_info
from core.sharing import (
    Polynomial,
    check_points,
    interpolate,
    lagrange_weight,
    mask_share,
    poly_random,
)
from schemes.envelope import GroupSignature, check_envelope, ms_partial_sign, receiver_recover

TAG_CH5 = "ch5"
TAG_CH6 = "ch6"
TAG_CH7 = "ch7"

MemberId = Hashable


def _dc_check(params: GroupParams, s_i: int, v_i: int, base: int, R_S: int) -> bool:
    return params.gexp(s_i) == params.mul(v_i, params.exp(base, R_S))


# ===== Cap. 5 =====

@dataclass(frozen=True)
class Ch5Member:
    y: Element          # chave pública do membro
    l: Scalar           # parte composta (visão do SDC)
    m: Element          # g^{l_i}
    n: Element          # g^{K_i}
    v: int              # l_i·y_i^K mod p
    u: Optional[int] = None


@dataclass(frozen=True)
class Ch5Setup:
    y_S: Element
    W: Element
    t: int
    members: Dict[MemberId, Ch5Member]
    poly: Optional[Polynomial] = None  # só o SDC


def ms5_setup_from_shares(params: GroupParams, y_S: int, K: int, t: int,
                          rows: Mapping[MemberId, Tuple[int, int, int]],
                          points: Optional[Mapping[MemberId, int]] = None,
                          poly: Optional[Polynomial] = None) -> Ch5Setup:
    """
    Monta a tabela pública a partir de (y_i, K_i, f_S(u_i)) por membro.

    Usado quando os pontos u_i não são conhecidos (vetor de referência).
    """
    members = {}
    for member_id, (y_i, K_i, f_i) in rows.items():
        l = params.add(K_i, f_i)
        members[member_id] = Ch5Member(
            y=Element(y_i),
            l=l,
            m=params.gexp(l),
            n=params.gexp(K_i),
            v=mask_share(l, y_i, K, params).v,
            u=(points or {}).get(member_id),
        )
    return Ch5Setup(Element(y_S), params.gexp(-K), t, members, poly)


def ms5_setup(params: GroupParams, roster: Mapping[MemberId, Tuple[int, int]], t: int,
              K: Optional[int] = None, member_secrets: Optional[Mapping[MemberId, int]] = None,
              rng: Optional[random.Random] = None,
              coeffs: Optional[Sequence[int]] = None) -> Ch5Setup:
    """
    SDC: f_S de grau t−1, K_i por membro, l_i = K_i + f_S(u_i), m_i, n_i, v_i, W.

    Args:
        roster: id → (u_i, y_i)
        member_secrets: K_i fixos (senão aleatórios)
    """
    rng = rng or default_rng()
    check_points([u for u, _ in roster.values()], params.q)
    if not 1 <= t <= len(roster):
        raise ValueError(f"limiar t={t} inválido para {len(roster)} membros")
    K = params.random_scalar(rng) if K is None else K
    secret = coeffs[0] if coeffs is not None else params.random_scalar(rng)
    poly = poly_random(secret, t - 1, params.q, rng, coeffs)
    secrets = dict(member_secrets or {})
    rows = {}
    for member_id, (u, y) in roster.items():
        K_i = secrets.get(member_id)
        if K_i is None:
            K_i = params.random_scalar(rng, nonzero=False)
        rows[member_id] = (y, K_i, poly(u))
    points = {member_id: u for member_id, (u, _) in roster.items()}
    log_info(f"[CAP5] SDC configurou o grupo ({t} de {len(roster)})")
    return ms5_setup_from_shares(params, params.gexp(poly.secret), K, t, rows, points, poly)


def subset_weights(q: int, points: Mapping[MemberId, int], subset: Sequence[MemberId]) -> Dict[MemberId, Scalar]:
    """λ_i = peso de Lagrange em zero de cada membro do subconjunto."""
    xs = [points[i] for i in subset]
    return {i: lagrange_weight(0, points[i], xs, q) for i in subset}


def ms5_weights(params: GroupParams, setup: Ch5Setup, subset: Sequence[MemberId]) -> Dict[MemberId, Scalar]:
    points = {}
    for i in subset:
        if setup.members[i].u is None:
            raise ValueError(f"ponto público de {i} desconhecido; informe os pesos")
        points[i] = setup.members[i].u
    return subset_weights(params.q, points, subset)


def ms5_partial_sign(params: GroupParams, l_i: int, weight: int, K1: int, R_S: int) -> Tuple[Scalar, Scalar]:
    """(MS_i, s_i) com MS_i = l_i·λ_i e s_i = K_{i1} + MS_i·R_S."""
    return ms_partial_sign(params, l_i, weight, K1, R_S)


def ms5_dc_check(params: GroupParams, s_i: int, v_i: int, m_i: int, weight: int, R_S: int) -> bool:
    """g^{s_i} ≟ v_i·(m_i^{λ_i})^{R_S}."""
    return _dc_check(params, s_i, v_i, params.exp(m_i, weight), R_S)


def ms5_E(params: GroupParams, n_values: Mapping[MemberId, int], weights: Mapping[MemberId, int]) -> Element:
    """E = ∏ n_i^{λ_i} (1 para subconjunto vazio)."""
    return params.mul(*(params.exp(n_values[i], weights[i]) for i in weights))


def ms5_verify(params: GroupParams, sig: GroupSignature, receiver: KeyPair, y_S: int,
               oracle: HashOracle) -> bool:
    """
    g^{S_S} ≟ R_R·(E·y_S)^{R_S}, com R_R = W_S·U_S^{x_R}.

    E vem dos anexos públicos "n" e "weights" do envelope.
    """
    E = ms5_E(params, sig.attachments.get("n", {}), sig.attachments.get("weights", {}))
    R_R = receiver_recover(params, sig, receiver.x)
    ok = check_envelope(params, sig, R_R, params.mul(E, y_S), TAG_CH5, oracle)
    log_info(f"[CAP5] Verificação pelo receptor: {'aceita' if ok else 'rejeitada'}")
    return ok


# ===== Cap. 6 =====

@dataclass(frozen=True)
class DealtShare:
    h: Scalar
    l: Scalar     # h_ij + f_i(u_j)
    m: Element    # g^{l}
    n: Element    # g^{h}
    v: int        # l·y_j^K mod p


@dataclass(frozen=True)
class Ch6Member:
    u: int
    y: Element        # chave pública do membro (mascaramento)
    y_part: Element   # g^{f_i(0)}


@dataclass(frozen=True)
class Ch6Setup:
    y_S: Element
    W: Element
    t: int
    members: Dict[MemberId, Ch6Member]
    dealt: Dict[Tuple[MemberId, MemberId], DealtShare]   # (distribuidor, destinatário)
    polys: Dict[MemberId, Polynomial]                     # cada f_i só com o próprio membro

    def received_by(self, recipient: MemberId, dealers: Sequence[MemberId]) -> Dict[MemberId, DealtShare]:
        return {j: self.dealt[(j, recipient)] for j in dealers}


def ms6_setup(params: GroupParams, roster: Mapping[MemberId, Tuple[int, int]], t: int,
              K: Optional[int] = None,
              polys: Optional[Mapping[MemberId, Sequence[int]]] = None,
              pair_secrets: Optional[Mapping[Tuple[MemberId, MemberId], int]] = None,
              rng: Optional[random.Random] = None) -> Ch6Setup:
    """
    Cada membro i distribui para todo j ≠ i: l_ij = h_ij + f_i(u_j), m_ij, n_ij, v_ij.

    Args:
        roster: id → (u_i, y_i)
        polys: coeficientes fixos de cada f_i (grau t−1)
        pair_secrets: h_ij fixos indexados por (i, j)
        K: segredo comum combinado previamente
    """
    rng = rng or default_rng()
    check_points([u for u, _ in roster.values()], params.q)
    if not 1 <= t <= len(roster):
        raise ValueError(f"limiar t={t} inválido para {len(roster)} membros")
    K = params.random_scalar(rng) if K is None else K
    fixed = dict(polys or {})
    h_fixed = dict(pair_secrets or {})

    poly_by_member: Dict[MemberId, Polynomial] = {}
    members: Dict[MemberId, Ch6Member] = {}
    for i, (u, y) in roster.items():
        coeffs = fixed.get(i)
        secret = coeffs[0] if coeffs is not None else params.random_scalar(rng)
        poly_by_member[i] = poly_random(secret, t - 1, params.q, rng, coeffs)
        members[i] = Ch6Member(u, Element(y), params.gexp(secret))

    dealt: Dict[Tuple[MemberId, MemberId], DealtShare] = {}
    for i, f_i in poly_by_member.items():
        for j, (u_j, y_j) in roster.items():
            if j == i:
                continue
            h = h_fixed.get((i, j))
            h = params.random_scalar(rng, nonzero=False) if h is None else params.scalar(h)
            l = params.add(h, f_i(u_j))
            dealt[(i, j)] = DealtShare(h, l, params.gexp(l), params.gexp(h), mask_share(l, y_j, K, params).v)

    y_S = params.mul(*(m.y_part for m in members.values()))
    log_info(f"[CAP6] {len(roster)} distribuidores publicaram suas tabelas")
    return Ch6Setup(y_S, params.gexp(-K), t, members, dealt, poly_by_member)


def ms6_weight(params: GroupParams, setup: Ch6Setup, member: MemberId, subset: Sequence[MemberId]) -> Scalar:
    """C_i = peso de Lagrange em zero de u_i sobre o subconjunto signatário."""
    return lagrange_weight(0, setup.members[member].u, [setup.members[j].u for j in subset], params.q)


def ms6_partial_sign(params: GroupParams, f_i0: int, received: Sequence[int], C_i: int,
                     K1: int, R_S: int) -> Tuple[Scalar, Scalar]:
    """
    MS_i = Σ_{j∉H} l_{ji}·C_i; s_i = K_{i1} + (f_i(0) + MS_i)·R_S.

    Returns:
        (MS_i, s_i)
    """
    MS = params.smul(sum(received), C_i)
    return MS, params.add(K1, params.smul(params.add(f_i0, MS), R_S))


def ms6_dc_check(params: GroupParams, s_i: int, v_i: int, y_i: int, m_received: Sequence[int],
                 C_i: int, R_S: int) -> bool:
    """g^{s_i} ≟ v_i·(y_i·∏ m_{ji}^{C_i})^{R_S}."""
    base = params.mul(y_i, *(params.exp(m, C_i) for m in m_received))
    return _dc_check(params, s_i, v_i, base, R_S)


def ms6_E(params: GroupParams, n_values: Mapping[MemberId, Sequence[int]],
          weights: Mapping[MemberId, int]) -> Element:
    """E = ∏_{i∈H} (∏_{j∉H} n_{ji})^{C_i}."""
    return params.mul(*(params.exp(params.mul(*n_values[i]), weights[i]) for i in weights))


def ms6_verify(params: GroupParams, sig: GroupSignature, receiver: KeyPair, y_S: int,
               oracle: HashOracle) -> bool:
    """Mesma congruência do cap. 5 com E do cap. 6 (anexos "n" e "weights")."""
    E = ms6_E(params, sig.attachments.get("n", {}), sig.attachments.get("weights", {}))
    R_R = receiver_recover(params, sig, receiver.x)
    ok = check_envelope(params, sig, R_R, params.mul(E, y_S), TAG_CH6, oracle)
    log_info(f"[CAP6] Verificação pelo receptor: {'aceita' if ok else 'rejeitada'}")
    return ok


# ===== Cap. 7 =====

@dataclass(frozen=True)
class AuthorizedSubset:
    members: Tuple[MemberId, ...]
    u_H: int
    poly: Polynomial              # só o SDC
    Lambda: Scalar                # ∏ (0 − u_j)/(u_H − u_j)
    V_K: Element
    l: Dict[MemberId, Scalar]
    m: Dict[MemberId, Element]
    v: Dict[MemberId, int]


@dataclass(frozen=True)
class Ch7Setup:
    y_S: Element
    W: Element
    roster: Dict[MemberId, Tuple[int, int]]
    subsets: Dict[str, AuthorizedSubset]


def ms7_setup(params: GroupParams, roster: Mapping[MemberId, Tuple[int, int]], x_s: int,
              member_secrets: Mapping[MemberId, int],
              subsets: Mapping[str, Tuple[Sequence[MemberId], int]],
              K: Optional[int] = None, rng: Optional[random.Random] = None) -> Ch7Setup:
    """
    Para cada subconjunto autorizado H: f_s de grau |H| por (0, x_s) e (u_i, k_i),
    V_K = g^{f_s(u_H)·Λ} e l_i = k_i·(−u_H)/(u_i − u_H) para todo o grupo.

    Args:
        roster: id → (u_i, y_i)
        member_secrets: id → k_i
        subsets: nome → (membros, u_H)
    """
    q = params.q
    points = {i: u for i, (u, _) in roster.items()}
    check_points(points.values(), q)
    K = params.random_scalar(rng or default_rng()) if K is None else K

    registry: Dict[str, AuthorizedSubset] = {}
    for name, (members, u_H) in subsets.items():
        if u_H % q == 0 or u_H % q in {u % q for u in points.values()}:
            raise SubsetPointCollision(f"u_H={u_H} do subconjunto {name} colide com o grupo ou com zero")
        members = tuple(members)
        anchor = [(0, x_s)] + [(points[i], member_secrets[i]) for i in members]
        poly = interpolate(anchor, q)
        for i in members:
            if poly(points[i]) != member_secrets[i] % q:
                raise ProtocolError(f"interpolação não reproduz k_{i}")
        Lambda = lagrange_weight(0, u_H, [u_H] + [points[i] for i in members], q)
        V_K = params.gexp(params.smul(poly(u_H), Lambda))

        l, m, v = {}, {}, {}
        for i, (u_i, y_i) in roster.items():
            l[i] = params.smul(member_secrets[i], params.smul(-u_H, params.inv(u_i - u_H)))
            m[i] = params.gexp(l[i])
            v[i] = mask_share(l[i], y_i, K, params).v
        registry[name] = AuthorizedSubset(members, u_H, poly, Lambda, V_K, l, m, v)
        log_info(f"[CAP7] Subconjunto {name} registrado ({len(members)} membros)")

    return Ch7Setup(params.gexp(x_s), params.gexp(-K), dict(roster), registry)


def ms7_weights(params: GroupParams, setup: Ch7Setup, subset: str) -> Dict[MemberId, Scalar]:
    record = setup.subsets[subset]
    return subset_weights(params.q, {i: setup.roster[i][0] for i in record.members}, record.members)


# mesmas fórmulas do cap. 5, com as partes l_i do subconjunto
ms7_partial_sign = ms5_partial_sign
ms7_dc_check = ms5_dc_check


def ms7_verify(params: GroupParams, sig: GroupSignature, receiver: KeyPair, y_S: int, V_K: int,
               oracle: HashOracle) -> bool:
    """V_K^{R_S}·g^{S_S} ≟ R_R·y_S^{R_S}."""
    R_R = receiver_recover(params, sig, receiver.x)
    ok = check_envelope(params, sig, R_R, y_S, TAG_CH7, oracle, V_K=V_K)
    log_info(f"[CAP7] Verificação pelo receptor: {'aceita' if ok else 'rejeitada'}")
    return ok
