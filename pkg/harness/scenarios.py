# harness/scenarios.py
"""
Execução determinística de cenários: cada esquema roda suas fases entre
atores no barramento e termina num veredito (aceita, rejeitada ou abortada).

Um cenário é um JSON com parâmetros, mensagem, chaves, nonces, tabela de hash
e a configuração do esquema. O que não for fixado é sorteado a partir da
semente, de forma independente por nome (a ordem de consumo não importa),
para que a mesma entrada gere sempre a mesma transcrição.
"""

import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from core.encoding import from_b64, from_hex, to_b64, to_hex
from core.errors import (
    DecryptionMismatch,
    DelegationCheckFailed,
    FixtureMiss,
    OpeningMismatch,
    PartialRejected,
    ProtocolError,
    ScenarioInvalid,
    ShareOutOfRange,
)
from core.group import GroupParams, KeyPair, keygen, validate_params
from core.hashing import FIXTURE, HashOracle
from core.logger import log_error, log_info, log_warning
from core.settings import is_format_supported
from core.sharing import unmask_share
from core.zk import ConfirmationProver, ConfirmationVerifier, Statement
from harness.bus import OPEN, SECRET, Actor, MessageBus, Role, SessionTranscript
from schemes import delegated, directed, envelope, multisig, threshold
from schemes.envelope import GroupSignature

SCHEMES = ("ch1", "ch1-tv", "ch1-tc", "ch2", "ch3", "ch4", "ch5", "ch6", "ch7")
FAULTS = ("zero_shadow", "corrupt_partial", "tamper_field")

# campos de cada assinatura e como adulterá-los em trânsito
SCALAR, ELEMENT, RAW, COUNT, SHADOWS = "scalar", "element", "bytes", "count", "shadows"
_ENVELOPE_FIELDS = {"S_S": SCALAR, "U_S": ELEMENT, "W_S": ELEMENT, "m": RAW}
SIGNATURE_FIELDS: Dict[str, Dict[str, str]] = {
    "ch1": {"S_A": SCALAR, "W_B": ELEMENT, "V_B": ELEMENT, "m": RAW},
    "ch1-tv": {"S_A": SCALAR, "W_R": ELEMENT, "m": RAW, "k": COUNT, "shadows": SHADOWS},
    "ch1-tc": {"S_A": SCALAR, "W_R": ELEMENT, "c": RAW, "tag": RAW, "k": COUNT, "shadows": SHADOWS},
    "ch2": {"S_B": SCALAR, "r_B": SCALAR, "W_B": ELEMENT, "r": ELEMENT, "m": RAW},
    "ch3": {"S": SCALAR, "R": SCALAR, "W": ELEMENT, "m": RAW},
    "ch4": _ENVELOPE_FIELDS,
    "ch5": _ENVELOPE_FIELDS,
    "ch6": _ENVELOPE_FIELDS,
    "ch7": _ENVELOPE_FIELDS,
}


@dataclass(frozen=True)
class Verdict:
    status: str                   # accepted | rejected | aborted
    reason: Optional[str] = None
    actor: Optional[str] = None

    @property
    def accepted(self) -> bool:
        return self.status == "accepted"

    def __str__(self) -> str:
        if self.status == "aborted":
            return f"aborted({self.actor}: {self.reason})"
        if self.status == "rejected":
            return f"rejected({self.reason})"
        return "accepted"


ACCEPTED = Verdict("accepted")


@dataclass
class ScenarioResult:
    verdict: Verdict
    transcript: SessionTranscript
    values: Dict[str, Any] = field(default_factory=dict)


# ===== Cenário =====

class Scenario:
    """Cenário validado; chaves e nonces não fixados saem da semente."""

    def __init__(self, data: Dict[str, Any], name: str = ""):
        if not isinstance(data, dict):
            raise ScenarioInvalid("cenário deve ser um objeto JSON")
        self.raw = data
        self.name = name or data.get("name", data.get("scheme", "cenário"))

        fmt = str(data.get("format_version", "1.0"))
        if not is_format_supported(fmt):
            raise ScenarioInvalid(f"versão de formato não suportada: {fmt}")

        self.scheme = data.get("scheme")
        if self.scheme not in SCHEMES:
            raise ScenarioInvalid(f"esquema desconhecido: {self.scheme!r}")

        try:
            p, q, g = (from_hex(data["params"][k]) for k in ("p", "q", "g"))
            self.params: GroupParams = validate_params(p, q, g)
            self.message: bytes = from_b64(data.get("message", ""))
        except (KeyError, TypeError, ValueError) as e:
            raise ScenarioInvalid(f"parâmetros ou mensagem inválidos: {e}") from e
        except ProtocolError as e:
            raise ScenarioInvalid(f"parâmetros rejeitados: {e}") from e

        self.seed = data.get("seed", 0)
        self.setup: Dict[str, Any] = dict(data.get("setup", {}))
        self.nonces: Dict[str, Any] = dict(data.get("nonces", {}))
        self.zk: Optional[Dict[str, Any]] = data.get("zk")
        self.faults: List[Dict[str, Any]] = list(data.get("faults", []))
        for fault in self.faults:
            if fault.get("kind") not in FAULTS:
                raise ScenarioInvalid(f"falha desconhecida: {fault.get('kind')!r}")

        hash_cfg = data.get("hash", {"mode": "standard"})
        if hash_cfg.get("mode", "standard") == "fixture":
            self.oracle = HashOracle.from_json(self.params.q, hash_cfg.get("fixtures", []))
        else:
            self.oracle = HashOracle.standard(self.params.q)

        self._key_hex: Dict[str, str] = dict(data.get("keys", {}))
        self._keys: Dict[str, KeyPair] = {}
        _validate_layout(self)

    def rng(self, label: str) -> random.Random:
        return random.Random(f"{self.seed}:{label}")

    def key(self, actor_id: str) -> KeyPair:
        if actor_id not in self._keys:
            try:
                if actor_id in self._key_hex:
                    pair = keygen(self.params, x=from_hex(self._key_hex[actor_id]))
                else:
                    pair = keygen(self.params, self.rng(f"key:{actor_id}"))
            except (ValueError, ProtocolError) as e:
                raise ScenarioInvalid(f"chave de {actor_id} inválida: {e}") from e
            self._keys[actor_id] = pair
        return self._keys[actor_id]

    def scalar(self, section: Dict[str, Any], name: str, label: str, nonzero: bool = True) -> int:
        if name in section:
            return from_hex(section[name]) % self.params.q
        return self.params.random_scalar(self.rng(label), nonzero=nonzero)

    def nonce(self, name: str) -> int:
        return self.scalar(self.nonces, name, f"nonce:{name}")

    def nonce_pair(self, member: str) -> Tuple[int, int]:
        if member in self.nonces:
            K1, K2 = self.nonces[member]
            return from_hex(K1) % self.params.q, from_hex(K2) % self.params.q
        rng = self.rng(f"nonce:{member}")
        return self.params.random_scalar(rng), self.params.random_scalar(rng)

    def coeffs(self, section: Dict[str, Any], name: str) -> Optional[List[int]]:
        if name not in section:
            return None
        return [from_hex(c) for c in section[name]]

    def fault(self, kind: str, actor: Optional[str] = None) -> Optional[Dict[str, Any]]:
        for fault in self.faults:
            if fault["kind"] == kind and (actor is None or fault.get("actor") == actor):
                return fault
        return None

    @property
    def third_party(self) -> Optional[str]:
        return self.setup.get("third_party")

    def missing_fixtures(self) -> List[FixtureMiss]:
        """
        Confere a tabela de hash fixa com uma execução de ensaio, sem falhar.

        Devolve as entradas ausentes na ordem em que seriam consultadas; a
        primeira é exatamente a que interromperia a execução real.
        """
        if self.oracle.mode != FIXTURE:
            return []
        session = _Session(self, oracle=self.oracle.recording())
        RUNNERS[self.scheme](session)
        return list(session.oracle.misses)


def _ids(entries: Sequence[Dict[str, Any]]) -> List[str]:
    return [e["id"] for e in entries]


def _validate_layout(s: Scenario):
    """Tamanhos e limiares coerentes antes de qualquer mensagem."""
    st = s.setup
    try:
        if s.scheme in ("ch1-tv", "ch1-tc"):
            ids = _ids(st["group"])
            _check_threshold(st["k"], ids, st.get("subset", ids[:st["k"]]), "k")
        elif s.scheme == "ch3":
            ids = _ids(st["members"])
            _check_threshold(st["t"], ids, st.get("subset", ids[:st["t"]]), "t")
        elif s.scheme == "ch4":
            s_ids, r_ids = _ids(st["signers"]), _ids(st["verifiers"])
            _check_threshold(st["t"], s_ids, st.get("subset_S", s_ids[:st["t"]]), "t")
            _check_threshold(st["k"], r_ids, st.get("subset_R", r_ids[:st["k"]]), "k")
        elif s.scheme in ("ch5", "ch6"):
            ids = _ids(st["members"])
            _check_threshold(st["t"], ids, st.get("subset", ids[:st["t"]]), "t")
            if s.scheme == "ch5" and "poly" not in st and ("weights" not in st or "x_S" not in st):
                raise ScenarioInvalid("cap. 5 sem polinômio exige 'x_S' e 'weights'")
        elif s.scheme == "ch7":
            ids = _ids(st["members"])
            subsets = st["subsets"]
            chosen = st.get("signing_subset", next(iter(subsets)))
            if chosen not in subsets:
                raise ScenarioInvalid(f"subconjunto {chosen!r} não registrado")
            for name, record in subsets.items():
                unknown = set(record["members"]) - set(ids)
                if unknown:
                    raise ScenarioInvalid(f"subconjunto {name} cita membros desconhecidos: {sorted(unknown)}")
    except (KeyError, TypeError) as e:
        raise ScenarioInvalid(f"configuração incompleta para {s.scheme}: {e}") from e


def _check_threshold(t: int, ids: Sequence[str], subset: Sequence[str], label: str):
    if len(set(ids)) != len(ids):
        raise ScenarioInvalid("identificadores repetidos no grupo")
    if not 1 <= t <= len(ids):
        raise ScenarioInvalid(f"limiar {label}={t} incompatível com {len(ids)} membros")
    if len(subset) != t or not set(subset) <= set(ids):
        raise ScenarioInvalid(f"subconjunto deve ter exatamente {label}={t} membros do grupo")


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ScenarioInvalid(f"não foi possível ler {path}: {e}") from e
    return Scenario(data)


# ===== Sessão =====

class _Session:
    """Estado de uma execução: cenário, barramento e valores registrados."""

    def __init__(self, scenario: Scenario, transcript: Optional[SessionTranscript] = None,
                 oracle: Optional[HashOracle] = None):
        self.s = scenario
        self.params = scenario.params
        self.oracle = oracle or scenario.oracle
        self.bus = MessageBus()
        if transcript is not None:
            self.bus.transcript = transcript
        self.values: Dict[str, Any] = {}

    @property
    def transcript(self) -> SessionTranscript:
        return self.bus.transcript

    def actor(self, actor_id: str, role: Role, keyed: bool = True) -> Actor:
        if actor_id in self.bus.actors:
            return self.bus.actors[actor_id]
        return self.bus.register(Actor(actor_id, role, self.s.key(actor_id) if keyed else None))

    def record(self, **values: Any):
        self.values.update(values)

    def put(self, name: str, member: str, value: Any):
        self.values[f"{name}[{member}]"] = value

    def send_signature(self, sender: str, to: Optional[str], payload: Dict[str, Any]):
        """Entrega a assinatura final, aplicando `tamper_field` se configurado."""
        fault = self.s.fault("tamper_field")
        if fault is not None:
            payload = tamper(self.s.scheme, self.params, payload, fault["field"])
            log_warning(f"[SESSAO] Campo {fault['field']} adulterado em trânsito")
        self.transcript.record_signature(self.s.scheme, sender, payload)
        self.bus.send(sender, to, "signature", payload, OPEN)

    def corrupt(self, member: str, s_i: int) -> int:
        if self.s.fault("corrupt_partial", member) is not None:
            log_warning(f"[SESSAO] Parcial de {member} corrompida")
            return (s_i + 1) % self.params.q
        return s_i


def tamper(scheme: str, params: GroupParams, payload: Dict[str, Any], field_name: str) -> Dict[str, Any]:
    """Escalar +1 mod q, elemento ×g mod p, primeiro byte trocado, k+1 ou todas as sombras ×g."""
    kind = SIGNATURE_FIELDS[scheme].get(field_name)
    out = dict(payload)
    if kind == SCALAR:
        out[field_name] = (out[field_name] + 1) % params.q
    elif kind == ELEMENT:
        out[field_name] = out[field_name] * params.g % params.p
    elif kind == RAW:
        data = bytes(out[field_name])
        out[field_name] = bytes([data[0] ^ 1]) + data[1:] if data else b"\x00"
    elif kind == COUNT:
        out[field_name] = out[field_name] + 1
    elif kind == SHADOWS:
        out[field_name] = {member: v * params.g % params.p for member, v in out[field_name].items()}
    else:
        raise ScenarioInvalid(f"campo {field_name!r} não existe na assinatura {scheme}")
    return out


def _group_signature(payload: Dict[str, Any]) -> GroupSignature:
    return GroupSignature(payload["S_S"], payload["U_S"], payload["W_S"], payload["m"],
                          dict(payload.get("attachments", {})))


# ===== Prova de validade (comum) =====

def _zk_exchange(ss: _Session, prover: str, verifier: str, statement: Statement, x: int) -> Optional[Verdict]:
    """As quatro mensagens do protocolo de confirmação pelo barramento."""
    cfg = ss.s.zk or {}
    u = from_hex(cfg["u"]) if "u" in cfg else None
    v = from_hex(cfg["v"]) if "v" in cfg else None
    alpha = from_hex(cfg["alpha"]) if "alpha" in cfg else None
    rng = ss.s.rng("zk")

    vs = ConfirmationVerifier(ss.params, statement, u, v, rng)
    ps = ConfirmationProver(ss.params, statement, x)

    ss.bus.send(verifier, prover, "zk-commit", {"w": vs.commit()})
    w = ss.bus.take(prover, "zk-commit")["w"]
    beta, gamma = ps.respond(w, alpha, rng)
    ss.bus.send(prover, verifier, "zk-response", {"beta": beta, "gamma": gamma})
    response = ss.bus.take(verifier, "zk-response")
    vs.receive_response(response["beta"], response["gamma"])
    opened_u, opened_v = vs.reveal()
    ss.bus.send(verifier, prover, "zk-open", {"u": opened_u, "v": opened_v})
    opening = ss.bus.take(prover, "zk-open")
    try:
        ps.check_opening(opening["u"], opening["v"])
    except OpeningMismatch as e:
        return Verdict("aborted", str(e), prover)
    ss.bus.send(prover, verifier, "zk-final", {"alpha": ps.final()})
    return None


def _zk_stage(ss: _Session, prover: str, verifier: str, statement: Statement) -> Verdict:
    """Conferência final do terceiro, refeita só com as mensagens da transcrição."""
    tr = ss.transcript
    pr = ss.params
    try:
        w = tr.last("zk-commit", to=prover, sender=verifier).payload["w"]
        response = tr.last("zk-response", to=verifier, sender=prover).payload
        opening = tr.last("zk-open", to=prover, sender=verifier).payload
        alpha = tr.last("zk-final", to=verifier, sender=prover).payload["alpha"]
    except ProtocolError:
        return Verdict("aborted", "prova de validade interrompida", prover)
    u, v = opening["u"], opening["v"]
    beta, gamma = response["beta"], response["gamma"]
    ss.record(w=w, beta=beta, gamma=gamma, zk_u=u, zk_v=v, zk_alpha=alpha)
    ok = (
        w == pr.mul(pr.exp(statement.mu, u), pr.exp(statement.g, v))
        and beta == pr.mul(pr.exp(statement.mu, u), pr.exp(statement.g, v + alpha))
        and gamma == pr.mul(pr.exp(statement.Z, u), pr.exp(statement.y, v + alpha))
    )
    log_info(f"[ZK] {verifier} {'aceitou' if ok else 'rejeitou'} a prova de {prover}")
    return ACCEPTED if ok else Verdict("rejected", f"{verifier} rejeitou a prova de validade")


# ===== Cap. 1 =====

def _ch1_run(ss: _Session) -> Verdict:
    s, pr = ss.s, ss.params
    A, B, C = s.setup.get("signer", "A"), s.setup.get("receiver", "B"), s.third_party
    ss.actor(A, Role.SIGNER)
    ss.actor(B, Role.RECEIVER)
    if C:
        ss.actor(C, Role.THIRD_PARTY)

    sig = directed.ds_sign(pr, s.key(A), s.key(B).y, s.message, s.nonce("K1"), s.nonce("K2"), ss.oracle)
    ss.record(S_A=sig.S_A, W_B=sig.W_B, V_B=sig.V_B)
    ss.send_signature(A, B, {"S_A": sig.S_A, "W_B": sig.W_B, "V_B": sig.V_B, "m": sig.m})

    verdict = _ch1_receiver(ss)
    if not verdict.accepted or not C:
        return verdict

    received = ss.bus.take(B, "signature")
    sig = directed.DirectedSignature(received["S_A"], received["W_B"], received["V_B"], received["m"])
    R = directed.ds_recover(pr, sig, s.key(B).x)
    K = s.scalar(s.setup, "redesignate_K", "redesignate")
    moved = directed.ds_redesignate(pr, sig, R, s.key(C).y, K)
    ss.bus.send(B, C, "redesignation", {"S_A": moved.S_A, "W_C": moved.W_B, "V_C": moved.V_B, "m": moved.m})
    return _ch1_third_party(ss)


def _ch1_receiver(ss: _Session) -> Verdict:
    s = ss.s
    A, B = s.setup.get("signer", "A"), s.setup.get("receiver", "B")
    p = ss.transcript.last("signature", to=B).payload
    sig = directed.DirectedSignature(p["S_A"], p["W_B"], p["V_B"], p["m"])
    ss.record(R=directed.ds_recover(ss.params, sig, s.key(B).x))
    if not directed.ds_verify(ss.params, sig, s.key(B), s.key(A).y, ss.oracle):
        return Verdict("rejected", f"{B} rejeitou a assinatura dirigida")
    return ACCEPTED


def _ch1_third_party(ss: _Session) -> Verdict:
    s = ss.s
    A, C = s.setup.get("signer", "A"), s.third_party
    if not C:
        return ACCEPTED
    p = ss.transcript.last("redesignation", to=C).payload
    sig = directed.DirectedSignature(p["S_A"], p["W_C"], p["V_C"], p["m"])
    ss.record(W_C=sig.W_B, V_C=sig.V_B, R_C=directed.ds_recover(ss.params, sig, s.key(C).x))
    if not directed.ds_verify(ss.params, sig, s.key(C), s.key(A).y, ss.oracle):
        return Verdict("rejected", f"{C} rejeitou a assinatura redesignada")
    return ACCEPTED


# ===== Cap. 1: verificação por limiar e criptossistema =====

def _tv_layout(s: Scenario) -> Tuple[str, Dict[str, int], List[str], int]:
    st = s.setup
    group = {e["id"]: from_hex(e["u"]) for e in st["group"]}
    subset = st.get("subset", list(group)[:st["k"]])
    return st.get("signer", "A"), group, subset, st["k"]


def _tv_run(ss: _Session) -> Verdict:
    s, pr = ss.s, ss.params
    A, group, subset, k = _tv_layout(s)
    combiner = s.setup.get("combiner", "DC")
    ss.actor(A, Role.SIGNER)
    ss.actor(combiner, Role.COMBINER, keyed=False)
    for member in group:
        ss.actor(member, Role.SHAREHOLDER)

    coeffs = s.coeffs(s.setup, "poly")
    K1 = coeffs[0] if coeffs is not None else s.nonce("K1")
    K2 = s.nonce("K2")
    roster = [(u, s.key(member).y) for member, u in group.items()]
    rng = s.rng("poly")
    by_u = {u: member for member, u in group.items()}

    if s.scheme == "ch1-tv":
        bundle = directed.tv_sign(pr, s.key(A), roster, k, s.message, K1, K2, ss.oracle, rng, coeffs)
        payload = {"S_A": bundle.S_A, "W_R": bundle.W_R, "m": bundle.m}
    else:
        bundle = directed.tc_encrypt(pr, s.key(A), roster, k, s.message, K1, K2, ss.oracle, rng, coeffs)
        payload = {"S_A": bundle.S_A, "W_R": bundle.W_R, "c": bundle.c, "tag": bundle.tag}
    payload.update(k=k, shadows={by_u[u]: v for u, v in bundle.shadows})
    ss.record(S_A=bundle.S_A, W_R=bundle.W_R)
    for member, v in payload["shadows"].items():
        ss.put("v", member, v)
    ss.send_signature(A, None, payload)

    verdict = _tv_members(ss)
    if not verdict.accepted:
        return verdict

    points = [group[m] for m in subset]
    for member in subset:
        received = ss.bus.take(member, "signature")
        partial = directed.tv_member_partial(pr, s.key(member), group[member],
                                             received["shadows"][member], received["W_R"], points)
        if s.fault("zero_shadow", member) is not None:
            partial = 1
        ss.put("R_part", member, partial)
        ss.bus.send(member, combiner, "partial", {"R_i": partial})
    return _tv_combine(ss)


def _tv_members(ss: _Session) -> Verdict:
    """Cada membro do subconjunto precisa recuperar a própria sombra da assinatura difundida."""
    s, pr = ss.s, ss.params
    _, _, subset, _ = _tv_layout(s)
    p = ss.transcript.last("signature").payload
    for member in subset:
        if member not in p["shadows"]:
            return Verdict("rejected", f"assinatura sem sombra para {member}", member)
        try:
            unmask_share(p["shadows"][member], p["W_R"], s.key(member).x, pr)
        except ShareOutOfRange as e:
            return Verdict("rejected", f"{member} não recuperou a sombra: {e}", member)
    return ACCEPTED


def _tv_combine(ss: _Session) -> Verdict:
    s, pr = ss.s, ss.params
    A, group, subset, k = _tv_layout(s)
    combiner = s.setup.get("combiner", "DC")
    p = ss.transcript.last("signature").payload
    partials = [ss.transcript.last("partial", to=combiner, sender=m).payload["R_i"] for m in subset]
    ss.record(R=pr.mul(*partials))
    y_A = s.key(A).y
    if s.scheme == "ch1-tv":
        sig = directed.ThresholdVerifySignature(p["S_A"], p["W_R"], (), p["k"], p["m"])
        if not directed.tv_combine_verify(pr, partials, sig, y_A, ss.oracle):
            return Verdict("rejected", f"{combiner} rejeitou a assinatura")
        return ACCEPTED
    bundle = directed.ThresholdCiphertext(p["S_A"], p["W_R"], p["c"], p["tag"], (), p["k"])
    try:
        plaintext = directed.tc_decrypt(pr, partials, bundle, y_A, ss.oracle)
    except (DecryptionMismatch, FixtureMiss) as e:
        return Verdict("rejected", f"decifração falhou: {e}")
    ss.record(plaintext=plaintext)
    return ACCEPTED


# ===== Cap. 2 =====

def _ch2_ids(s: Scenario) -> Tuple[str, str, str, Optional[str]]:
    st = s.setup
    return st.get("original", "A"), st.get("proxy", "B"), st.get("receiver", "C"), s.third_party


def _ch2_run(ss: _Session) -> Verdict:
    s, pr = ss.s, ss.params
    A, B, C, Y = _ch2_ids(s)
    ss.actor(A, Role.SIGNER)
    ss.actor(B, Role.PROXY)
    ss.actor(C, Role.RECEIVER)
    if Y:
        ss.actor(Y, Role.THIRD_PARTY)

    session = delegated.DelegationSession(pr, s.key(A).y)
    ss.bus.send(A, B, "delegation-commit", {"r_A": session.commit(s.nonce("k_A"))})
    alpha = from_hex(s.nonces["alpha"]) if "alpha" in s.nonces else None
    ss.bus.send(B, A, "delegation-token", {"r": session.blind(alpha, s.rng("blind"))})
    s_A = ss.corrupt(A, session.sign(s.key(A)))
    ss.bus.send(A, B, "delegation-key", {"s_A": s_A}, SECRET)
    ss.record(r_A=session.r_A, r=session.r, s_A=session.s_A)
    try:
        proxy = session.accept(ss.bus.take(B, "delegation-key")["s_A"])
    except DelegationCheckFailed as e:
        return Verdict("aborted", str(e), B)
    ss.record(S=proxy.S)

    K1, K2 = s.nonce("K1"), s.nonce("K2")
    sig = delegated.pd_sign(pr, proxy, s.key(C).y, s.message, K1, K2, ss.oracle)
    ss.record(W_B=sig.W_B, Z_C=pr.exp(s.key(C).y, K1), r_B=sig.r_B, S_B=sig.S_B)
    ss.send_signature(B, C, {"S_B": sig.S_B, "W_B": sig.W_B, "r_B": sig.r_B, "r": sig.r, "m": sig.m})

    verdict = _ch2_receiver(ss)
    if not verdict.accepted or not Y:
        return verdict

    ss.bus.send(C, Y, "disclosure", {"Z": ss.values["Z"]})
    aborted = _zk_exchange(ss, C, Y, Statement(ss.values["mu"], ss.values["Z"], pr.g, s.key(C).y), s.key(C).x)
    return aborted or _ch2_third_party(ss)


def _ch2_signature(ss: _Session, to: str) -> delegated.ProxyDirectedSignature:
    p = ss.transcript.last("signature", to=to).payload
    return delegated.ProxyDirectedSignature(p["S_B"], p["W_B"], p["r_B"], p["r"], p["m"])


def _ch2_receiver(ss: _Session) -> Verdict:
    A, _, C, _ = _ch2_ids(ss.s)
    ok, mu, Z = delegated.pd_verify(ss.params, _ch2_signature(ss, C), ss.s.key(C), ss.s.key(A).y, ss.oracle)
    ss.record(mu=mu, Z=Z)
    return ACCEPTED if ok else Verdict("rejected", f"{C} rejeitou a assinatura do procurador")


def _ch2_third_party(ss: _Session) -> Verdict:
    A, _, C, Y = _ch2_ids(ss.s)
    if not Y:
        return ACCEPTED
    Z = ss.transcript.last("disclosure", to=Y).payload["Z"]
    ok, mu = delegated.pd_third_party_precheck(ss.params, _ch2_signature(ss, C), ss.s.key(A).y, Z, ss.oracle)
    if not ok:
        return Verdict("rejected", f"{Y} não confirmou o hash com o Z revelado")
    return _zk_stage(ss, C, Y, Statement(mu, Z, ss.params.g, ss.s.key(C).y))


# ===== Cap. 3 =====

def _ch3_layout(s: Scenario):
    st = s.setup
    points = {e["id"]: from_hex(e["u"]) for e in st["members"]}
    subset = st.get("subset", list(points)[:st["t"]])
    return points, subset, st.get("receiver", "B"), st.get("combiner", "DC")


def _ch3_run(ss: _Session) -> Verdict:
    s, pr = ss.s, ss.params
    points, subset, B, dc = _ch3_layout(s)
    Y = s.third_party
    ss.actor("SDC", Role.SDC, keyed=False)
    ss.actor(dc, Role.COMBINER, keyed=False)
    ss.actor(B, Role.RECEIVER)
    if Y:
        ss.actor(Y, Role.THIRD_PARTY)
    for member in points:
        ss.actor(member, Role.SHAREHOLDER, keyed=False)

    setup = threshold.ch3_setup(pr, list(points.values()), s.setup["t"], s.rng("setup"), s.coeffs(s.setup, "poly"))
    ss.record(y_G=setup.y_G)
    ss.bus.broadcast("SDC", "group-key", {"y_G": setup.y_G})
    for member, u in points.items():
        ss.put("share", member, setup.shares[u].value)
        ss.bus.send("SDC", member, "share", {"u": u, "value": setup.shares[u].value}, SECRET)

    y_B = s.key(B).y
    nonces = {m: s.nonce_pair(m) for m in subset}
    for member in subset:
        commit = threshold.ch3_partial_commit(pr, y_B, *nonces[member])
        ss.put("w", member, commit.w)
        ss.put("z", member, commit.z)
        ss.bus.send(member, dc, "commit-w", {"w": commit.w})
        ss.bus.send(member, dc, "commit-z", {"z": commit.z}, SECRET)

    commits = [threshold.Ch3Commitment(ss.bus.take(dc, "commit-w", m)["w"], ss.bus.take(dc, "commit-z", m)["z"])
               for m in subset]
    W, Z, R = threshold.ch3_aggregate(pr, commits, s.message, ss.oracle)
    ss.record(W=W, Z_S=Z, R=R)
    ss.bus.broadcast(dc, "challenge", {"R": R})

    subset_points = [points[m] for m in subset]
    for member in subset:
        share = ss.bus.take(member, "share")
        R_recv = ss.bus.take(member, "challenge")["R"]
        MS, s_i = threshold.ch3_partial_sign(pr, threshold.Share(share["u"], share["value"]),
                                             subset_points, nonces[member][0], R_recv)
        s_i = ss.corrupt(member, s_i)
        ss.put("MS", member, MS)
        ss.put("s", member, s_i)
        ss.bus.send(member, dc, "partial", {"s": s_i})

    S = threshold.ch3_combine(pr, [ss.bus.take(dc, "partial", m)["s"] for m in subset])
    ss.record(S=S)
    ss.send_signature(dc, B, {"S": S, "W": W, "R": R, "m": s.message})

    verdict = _ch3_receiver(ss)
    if not verdict.accepted or not Y:
        return verdict
    ss.bus.send(B, Y, "disclosure", {"Z": ss.values["Z"]})
    aborted = _zk_exchange(ss, B, Y, Statement(ss.values["mu"], ss.values["Z"], pr.g, y_B), s.key(B).x)
    return aborted or _ch3_third_party(ss)


def _ch3_signature(ss: _Session, to: str) -> threshold.Ch3Signature:
    p = ss.transcript.last("signature", to=to).payload
    return threshold.Ch3Signature(p["S"], p["W"], p["R"], p["m"])


def _ch3_receiver(ss: _Session) -> Verdict:
    _, _, B, _ = _ch3_layout(ss.s)
    sig = _ch3_signature(ss, B)
    y_G = ss.transcript.last("group-key").payload["y_G"]
    mu, Z = threshold.ch3_recover(ss.params, sig, y_G, ss.s.key(B).x)
    ss.record(mu=mu, Z=Z)
    if not threshold.ch3_verify(ss.params, sig, ss.s.key(B), y_G, ss.oracle):
        return Verdict("rejected", f"{B} rejeitou a assinatura de limiar")
    return ACCEPTED


def _ch3_third_party(ss: _Session) -> Verdict:
    _, _, B, _ = _ch3_layout(ss.s)
    Y = ss.s.third_party
    if not Y:
        return ACCEPTED
    pr = ss.params
    sig = _ch3_signature(ss, B)
    y_G = ss.transcript.last("group-key").payload["y_G"]
    Z = ss.transcript.last("disclosure", to=Y).payload["Z"]
    mu = pr.mul(pr.gexp(sig.S), pr.exp(y_G, sig.R), sig.W)
    try:
        ok = ss.oracle(threshold.TAG_CH3, [Z, sig.W, sig.m]) == sig.R
    except FixtureMiss:
        ok = False
    if not ok:
        return Verdict("rejected", f"{Y} não confirmou o hash com o Z revelado")
    return _zk_stage(ss, B, Y, Statement(mu, Z, pr.g, ss.s.key(B).y))


# ===== Envelope comum (cap. 4 a 7) =====

def _collect_commits(ss: _Session, signers: Sequence[str], dc: str, y_R: int) -> Dict[str, Tuple[int, int]]:
    """Compromissos de cada signatário ao combinador; devolve os nonces usados."""
    pr = ss.params
    nonces = {m: ss.s.nonce_pair(m) for m in signers}
    for member in signers:
        c = envelope.ms_commit(pr, y_R, *nonces[member])
        ss.put("cu", member, c.u)
        ss.put("cv", member, c.v)
        ss.put("cw", member, c.w)
        ss.bus.send(member, dc, "commit", {"u": c.u, "w": c.w})
        ss.bus.send(member, dc, "commit-v", {"v": c.v}, SECRET)
    return nonces


def _aggregate_and_challenge(ss: _Session, signers: Sequence[str], dc: str, tag: str):
    pr = ss.params
    commits = []
    for member in signers:
        open_part = ss.bus.take(dc, "commit", member)
        commits.append(envelope.Commitment(open_part["u"], ss.bus.take(dc, "commit-v", member)["v"], open_part["w"]))
    U, V, W = envelope.aggregate(pr, commits)
    R_S = ss.oracle(tag, [V, ss.s.message])
    ss.record(U_S=U, V_S=V, W_S=W, R_S=R_S)
    ss.bus.broadcast(dc, "challenge", {"R_S": R_S})
    return U, W, R_S, {m: c.v for m, c in zip(signers, commits)}


def _combine_checked(ss: _Session, signers: Sequence[str], dc: str,
                     checker: Optional[Callable[[str, int], bool]]) -> Tuple[Optional[int], Optional[Verdict]]:
    partials = {m: ss.bus.take(dc, "partial", m)["s"] for m in signers}
    try:
        S_S = envelope.ms_combine(ss.params, partials, checker)
    except PartialRejected as e:
        return None, Verdict("aborted", str(e), str(e.signer))
    ss.record(S_S=S_S)
    return S_S, None


def _envelope_zk(ss: _Session, receiver: str) -> Optional[Verdict]:
    """Receptor revela μ = U_S^{x_R} ao terceiro e executa a prova."""
    Y = ss.s.third_party
    pr = ss.params
    sig = _group_signature(ss.transcript.last("signature", to=receiver).payload)
    key = ss.s.key(receiver)
    mu = pr.exp(sig.U_S, key.x)
    ss.record(mu=mu)
    ss.bus.send(receiver, Y, "disclosure", {"mu": mu})
    return _zk_exchange(ss, receiver, Y, Statement(sig.U_S, mu, pr.g, key.y), key.x)


def _envelope_third_party(ss: _Session, receiver: str, key: int, tag: str, V_K: int = 1) -> Verdict:
    """Terceiro: R_R = W_S·μ, confere a congruência e depois a prova."""
    Y = ss.s.third_party
    if not Y:
        return ACCEPTED
    pr = ss.params
    sig = _group_signature(ss.transcript.last("signature", to=receiver).payload)
    mu = ss.transcript.last("disclosure", to=Y).payload["mu"]
    if not envelope.check_envelope(pr, sig, pr.mul(sig.W_S, mu), key, tag, ss.oracle, V_K):
        return Verdict("rejected", f"{Y} não confirmou a congruência com o μ revelado")
    return _zk_stage(ss, receiver, Y, Statement(sig.U_S, mu, pr.g, ss.s.key(receiver).y))


# ===== Cap. 4 =====

def _ch4_layout(s: Scenario):
    st = s.setup
    signers = {e["id"]: from_hex(e["u"]) for e in st["signers"]}
    verifiers = {e["id"]: from_hex(e["u"]) for e in st["verifiers"]}
    subset_S = st.get("subset_S", list(signers)[:st["t"]])
    subset_R = st.get("subset_R", list(verifiers)[:st["k"]])
    dc_R = st.get("combiner_R", subset_R[0])
    return signers, verifiers, subset_S, subset_R, dc_R


def _ch4_run(ss: _Session) -> Verdict:
    s, pr = ss.s, ss.params
    st = s.setup
    signers, verifiers, subset_S, subset_R, dc_R = _ch4_layout(s)
    ss.actor("CTC", Role.CTC, keyed=False)
    ss.actor("DC", Role.COMBINER, keyed=False)
    for member in list(signers) + list(verifiers):
        ss.actor(member, Role.SHAREHOLDER)

    setup = threshold.ch4_setup(
        pr,
        [(u, s.key(m).y) for m, u in signers.items()], st["t"],
        [(u, s.key(m).y) for m, u in verifiers.items()], st["k"],
        K=s.scalar(st, "K", "K"), rng=s.rng("setup"),
        coeffs_S=s.coeffs(st, "poly_S"), coeffs_R=s.coeffs(st, "poly_R"),
    )
    y_S, y_R = setup.signing.public_key, setup.verifying.public_key
    ss.record(y_S=y_S, y_R=y_R, W=setup.signing.W)
    ss.bus.broadcast("CTC", "group-keys", {"y_S": y_S, "y_R": y_R, "W": setup.signing.W})
    for group, roster in ((setup.signing, signers), (setup.verifying, verifiers)):
        for member, u in roster.items():
            ss.put("y", member, s.key(member).y)
            ss.put("f", member, group.poly(u))
            ss.put("v", member, group.masked[u])
            ss.bus.send("CTC", member, "masked-share", {"v": group.masked[u], "W": group.W})

    nonces = _collect_commits(ss, subset_S, "DC", y_R)
    U, W_S, R_S, _ = _aggregate_and_challenge(ss, subset_S, "DC", threshold.TAG_CH4)

    points_S = [signers[m] for m in subset_S]
    for member in subset_S:
        masked = ss.bus.take(member, "masked-share")
        R_recv = ss.bus.take(member, "challenge")["R_S"]
        try:
            MS = threshold.ch4_member_shadow(pr, s.key(member), signers[member], masked["v"], masked["W"], points_S)
        except ShareOutOfRange as e:
            return Verdict("aborted", str(e), member)
        s_i = ss.corrupt(member, threshold.ch4_partial_sign(pr, MS, nonces[member][0], R_recv))
        ss.put("MS", member, MS)
        ss.put("s", member, s_i)
        ss.bus.send(member, "DC", "partial", {"s": s_i})

    S_S, _ = _combine_checked(ss, subset_S, "DC", None)
    ss.send_signature("DC", None, {"S_S": S_S, "U_S": U, "W_S": W_S, "m": s.message,
                                   "attachments": {"subset": list(subset_S)}})

    points_R = [verifiers[m] for m in subset_R]
    for member in subset_R:
        sig = _group_signature(ss.bus.take(member, "signature"))
        masked = ss.bus.take(member, "masked-share")
        try:
            MS_R = threshold.ch4_member_shadow(pr, s.key(member), verifiers[member], masked["v"], masked["W"], points_R)
        except ShareOutOfRange as e:
            return Verdict("aborted", str(e), member)
        if s.fault("zero_shadow", member) is not None:
            MS_R = 0
        ss.put("MS_R", member, MS_R)
        ss.bus.send(member, dc_R, "verify-shadow", {"MS": MS_R}, SECRET)
    return _ch4_verify(ss)


def _ch4_verify(ss: _Session) -> Verdict:
    _, _, _, subset_R, dc_R = _ch4_layout(ss.s)
    pr = ss.params
    sig = _group_signature(ss.transcript.last("signature").payload)
    keys = ss.transcript.last("group-keys").payload
    shadows = [ss.transcript.last("verify-shadow", to=dc_R, sender=m).payload["MS"] for m in subset_R]
    ss.record(sum_MS_R=sum(shadows) % pr.q, R_R=pr.mul(sig.W_S, pr.exp(sig.U_S, sum(shadows))))
    if not threshold.ch4_verify(pr, sig, shadows, ss.s.setup["k"], keys["y_S"], ss.oracle):
        return Verdict("rejected", f"grupo verificador ({dc_R}) rejeitou a assinatura")
    return ACCEPTED


# ===== Cap. 5 =====

def _ms_layout(s: Scenario):
    st = s.setup
    ids = _ids(st["members"])
    subset = st.get("subset", ids[:st.get("t", len(ids))])
    return ids, subset, st.get("receiver", "R"), st.get("combiner", "DC")


def _ch5_run(ss: _Session) -> Verdict:
    s, pr = ss.s, ss.params
    st = s.setup
    ids, subset, receiver, dc = _ms_layout(s)
    ss.actor("SDC", Role.SDC, keyed=False)
    ss.actor(dc, Role.COMBINER, keyed=False)
    ss.actor(receiver, Role.RECEIVER)
    if s.third_party:
        ss.actor(s.third_party, Role.THIRD_PARTY)
    for member in ids:
        ss.actor(member, Role.SHAREHOLDER)

    K = s.scalar(st, "K", "K")
    entries = {e["id"]: e for e in st["members"]}
    if "poly" in st:
        roster = {m: (from_hex(e["u"]), s.key(m).y) for m, e in entries.items()}
        secrets = {m: from_hex(e["K_i"]) for m, e in entries.items() if "K_i" in e}
        setup = multisig.ms5_setup(pr, roster, st["t"], K, secrets, s.rng("setup"), s.coeffs(st, "poly"))
        weights = multisig.ms5_weights(pr, setup, subset)
    else:
        rows = {m: (s.key(m).y, from_hex(e["K_i"]), from_hex(e["f"])) for m, e in entries.items()}
        setup = multisig.ms5_setup_from_shares(pr, pr.gexp(from_hex(st["x_S"])), K, st["t"], rows)
        weights = {m: from_hex(st["weights"][m]) % pr.q for m in subset}

    ss.record(y_S=setup.y_S, W=setup.W)
    publics = {"y_S": setup.y_S, "W": setup.W,
               "m": {m: r.m for m, r in setup.members.items()},
               "n": {m: r.n for m, r in setup.members.items()}}
    ss.bus.broadcast("SDC", "publics", publics)
    for member, row in setup.members.items():
        for name in ("y", "l", "m", "n", "v"):
            ss.put(name, member, getattr(row, name))
        ss.bus.send("SDC", member, "masked-share", {"v": row.v, "W": setup.W})

    y_R = s.key(receiver).y
    nonces = _collect_commits(ss, subset, dc, y_R)
    U, W_S, R_S, commit_v = _aggregate_and_challenge(ss, subset, dc, multisig.TAG_CH5)

    for member in subset:
        masked = ss.bus.take(member, "masked-share")
        R_recv = ss.bus.take(member, "challenge")["R_S"]
        try:
            l = unmask_share(masked["v"], masked["W"], s.key(member).x, pr)
        except ShareOutOfRange as e:
            return Verdict("aborted", str(e), member)
        MS, s_i = multisig.ms5_partial_sign(pr, l, weights[member], nonces[member][0], R_recv)
        s_i = ss.corrupt(member, s_i)
        ss.put("lambda", member, weights[member])
        ss.put("MS", member, MS)
        ss.put("s", member, s_i)
        ss.bus.send(member, dc, "partial", {"s": s_i})

    m_pub = publics["m"]
    S_S, aborted = _combine_checked(
        ss, subset, dc,
        lambda member, s_i: multisig.ms5_dc_check(pr, s_i, commit_v[member], m_pub[member], weights[member], R_S),
    )
    if aborted:
        return aborted
    ss.send_signature(dc, receiver, {"S_S": S_S, "U_S": U, "W_S": W_S, "m": s.message,
                                     "attachments": {"subset": list(subset),
                                                     "n": {m: publics["n"][m] for m in subset},
                                                     "weights": dict(weights)}})
    verdict = _ch5_receiver(ss)
    if not verdict.accepted or not s.third_party:
        return verdict
    return _envelope_zk(ss, receiver) or _ch5_third_party(ss)


def _ch5_key(ss: _Session, sig: GroupSignature) -> int:
    E = multisig.ms5_E(ss.params, sig.attachments["n"], sig.attachments["weights"])
    ss.record(E=E)
    return ss.params.mul(E, ss.transcript.last("publics").payload["y_S"])


def _ch5_receiver(ss: _Session) -> Verdict:
    _, _, receiver, _ = _ms_layout(ss.s)
    sig = _group_signature(ss.transcript.last("signature", to=receiver).payload)
    y_S = ss.transcript.last("publics").payload["y_S"]
    _ch5_key(ss, sig)
    ss.record(R_R=envelope.receiver_recover(ss.params, sig, ss.s.key(receiver).x))
    if not multisig.ms5_verify(ss.params, sig, ss.s.key(receiver), y_S, ss.oracle):
        return Verdict("rejected", f"{receiver} rejeitou a multiassinatura")
    return ACCEPTED


def _ch5_third_party(ss: _Session) -> Verdict:
    _, _, receiver, _ = _ms_layout(ss.s)
    sig = _group_signature(ss.transcript.last("signature", to=receiver).payload)
    return _envelope_third_party(ss, receiver, _ch5_key(ss, sig), multisig.TAG_CH5)


# ===== Cap. 6 =====

def _pair_key(text: str) -> Tuple[str, str]:
    dealer, recipient = text.split(">")
    return dealer.strip(), recipient.strip()


def _ch6_run(ss: _Session) -> Verdict:
    s, pr = ss.s, ss.params
    st = s.setup
    ids, subset, receiver, dc = _ms_layout(s)
    ss.actor(dc, Role.COMBINER, keyed=False)
    ss.actor(receiver, Role.RECEIVER)
    if s.third_party:
        ss.actor(s.third_party, Role.THIRD_PARTY)
    for member in ids:
        ss.actor(member, Role.SHAREHOLDER)

    entries = {e["id"]: e for e in st["members"]}
    roster = {m: (from_hex(e["u"]), s.key(m).y) for m, e in entries.items()}
    polys = {m: [from_hex(c) for c in e["poly"]] for m, e in entries.items() if "poly" in e}
    pair_secrets = {_pair_key(k): from_hex(v) for k, v in st.get("h", {}).items()}
    setup = multisig.ms6_setup(pr, roster, st["t"], s.scalar(st, "K", "K"), polys, pair_secrets, s.rng("setup"))
    ss.record(W=setup.W)

    for dealer in ids:
        others = [j for j in ids if j != dealer]
        ss.bus.broadcast(dealer, "dealer-publics", {
            "y_part": setup.members[dealer].y_part, "W": setup.W,
            "m": {j: setup.dealt[(dealer, j)].m for j in others},
            "n": {j: setup.dealt[(dealer, j)].n for j in others},
        })
        ss.put("y_part", dealer, setup.members[dealer].y_part)
        ss.put("y", dealer, setup.members[dealer].y)
        for j in others:
            share = setup.dealt[(dealer, j)]
            for name in ("h", "l", "m", "n", "v"):
                ss.values[f"{name}[{dealer}>{j}]"] = getattr(share, name)
            ss.bus.send(dealer, j, "dealt-share", {"v": share.v})
    y_S = _ch6_group_key(ss)

    y_R = s.key(receiver).y
    nonces = _collect_commits(ss, subset, dc, y_R)
    U, W_S, R_S, commit_v = _aggregate_and_challenge(ss, subset, dc, multisig.TAG_CH6)

    outsiders = [j for j in ids if j not in subset]
    weights = {m: multisig.ms6_weight(pr, setup, m, subset) for m in subset}
    for member in subset:
        R_recv = ss.bus.take(member, "challenge")["R_S"]
        received = []
        for dealer in outsiders:
            v = ss.bus.take(member, "dealt-share", dealer)["v"]
            try:
                received.append(unmask_share(v, setup.W, s.key(member).x, pr))
            except ShareOutOfRange as e:
                return Verdict("aborted", str(e), member)
        MS, s_i = multisig.ms6_partial_sign(pr, setup.polys[member].secret, received, weights[member],
                                            nonces[member][0], R_recv)
        s_i = ss.corrupt(member, s_i)
        ss.put("C", member, weights[member])
        ss.put("MS", member, MS)
        ss.put("s", member, s_i)
        ss.bus.send(member, dc, "partial", {"s": s_i})

    publics = {d: ss.transcript.last("dealer-publics", sender=d).payload for d in ids}

    def check(member: str, s_i: int) -> bool:
        m_received = [publics[d]["m"][member] for d in outsiders]
        return multisig.ms6_dc_check(pr, s_i, commit_v[member], publics[member]["y_part"],
                                     m_received, weights[member], R_S)

    S_S, aborted = _combine_checked(ss, subset, dc, check)
    if aborted:
        return aborted
    n_attached = {m: [publics[d]["n"][m] for d in outsiders] for m in subset}
    ss.send_signature(dc, receiver, {"S_S": S_S, "U_S": U, "W_S": W_S, "m": s.message,
                                     "attachments": {"subset": list(subset), "n": n_attached,
                                                     "weights": dict(weights)}})
    ss.record(y_S=y_S)
    verdict = _ch6_receiver(ss)
    if not verdict.accepted or not s.third_party:
        return verdict
    return _envelope_zk(ss, receiver) or _ch6_third_party(ss)


def _ch6_group_key(ss: _Session) -> int:
    ids = _ids(ss.s.setup["members"])
    return ss.params.mul(*(ss.transcript.last("dealer-publics", sender=d).payload["y_part"] for d in ids))


def _ch6_key(ss: _Session, sig: GroupSignature) -> int:
    E = multisig.ms6_E(ss.params, sig.attachments["n"], sig.attachments["weights"])
    ss.record(E=E)
    return ss.params.mul(E, _ch6_group_key(ss))


def _ch6_receiver(ss: _Session) -> Verdict:
    _, _, receiver, _ = _ms_layout(ss.s)
    sig = _group_signature(ss.transcript.last("signature", to=receiver).payload)
    _ch6_key(ss, sig)
    ss.record(R_R=envelope.receiver_recover(ss.params, sig, ss.s.key(receiver).x))
    if not multisig.ms6_verify(ss.params, sig, ss.s.key(receiver), _ch6_group_key(ss), ss.oracle):
        return Verdict("rejected", f"{receiver} rejeitou a multiassinatura")
    return ACCEPTED


def _ch6_third_party(ss: _Session) -> Verdict:
    _, _, receiver, _ = _ms_layout(ss.s)
    sig = _group_signature(ss.transcript.last("signature", to=receiver).payload)
    return _envelope_third_party(ss, receiver, _ch6_key(ss, sig), multisig.TAG_CH6)


# ===== Cap. 7 =====

def _ch7_layout(s: Scenario):
    st = s.setup
    chosen = st.get("signing_subset", next(iter(st["subsets"])))
    return chosen, list(st["subsets"][chosen]["members"]), st.get("receiver", "R"), st.get("combiner", "DC")


def _ch7_run(ss: _Session) -> Verdict:
    s, pr = ss.s, ss.params
    st = s.setup
    chosen, signers, receiver, dc = _ch7_layout(s)
    ids = _ids(st["members"])
    ss.actor("SDC", Role.SDC, keyed=False)
    ss.actor(dc, Role.COMBINER, keyed=False)
    ss.actor(receiver, Role.RECEIVER)
    if s.third_party:
        ss.actor(s.third_party, Role.THIRD_PARTY)
    for member in ids:
        ss.actor(member, Role.SHAREHOLDER)

    entries = {e["id"]: e for e in st["members"]}
    roster = {m: (from_hex(e["u"]), s.key(m).y) for m, e in entries.items()}
    x_s = s.scalar(st, "x_S", "x_S")
    k_values = {m: (from_hex(e["k"]) if "k" in e else pr.random_scalar(s.rng(f"k:{m}"))) for m, e in entries.items()}
    subsets = {name: (rec["members"], from_hex(rec["u_H"])) for name, rec in st["subsets"].items()}
    setup = multisig.ms7_setup(pr, roster, x_s, k_values, subsets, s.scalar(st, "K", "K"))
    record = setup.subsets[chosen]

    ss.record(y_S=setup.y_S, W=setup.W, f_s=str(record.poly), V_K=record.V_K, Lambda=record.Lambda)
    ss.bus.broadcast("SDC", "publics", {
        "y_S": setup.y_S, "W": setup.W,
        "subsets": {name: {"V_K": rec.V_K, "members": list(rec.members), "m": dict(rec.m)}
                    for name, rec in setup.subsets.items()},
    })
    for member in ids:
        for name in ("l", "m", "v"):
            ss.put(name, member, getattr(record, name)[member])
        ss.put("y", member, s.key(member).y)
        for name, rec in setup.subsets.items():
            ss.bus.send("SDC", member, "masked-share", {"subset": name, "v": rec.v[member], "W": setup.W})

    y_R = s.key(receiver).y
    nonces = _collect_commits(ss, signers, dc, y_R)
    U, W_S, R_S, commit_v = _aggregate_and_challenge(ss, signers, dc, multisig.TAG_CH7)

    weights = multisig.ms7_weights(pr, setup, chosen)
    for member in signers:
        R_recv = ss.bus.take(member, "challenge")["R_S"]
        masked = next(e.payload for e in ss.bus.actor(member).inbox
                      if e.kind == "masked-share" and e.payload["subset"] == chosen)
        try:
            l = unmask_share(masked["v"], masked["W"], s.key(member).x, pr)
        except ShareOutOfRange as e:
            return Verdict("aborted", str(e), member)
        MS, s_i = multisig.ms7_partial_sign(pr, l, weights[member], nonces[member][0], R_recv)
        s_i = ss.corrupt(member, s_i)
        ss.put("lambda", member, weights[member])
        ss.put("MS", member, MS)
        ss.put("s", member, s_i)
        ss.bus.send(member, dc, "partial", {"s": s_i})

    S_S, aborted = _combine_checked(
        ss, signers, dc,
        lambda member, s_i: multisig.ms7_dc_check(pr, s_i, commit_v[member], record.m[member], weights[member], R_S),
    )
    if aborted:
        return aborted
    ss.send_signature(dc, receiver, {"S_S": S_S, "U_S": U, "W_S": W_S, "m": s.message,
                                     "attachments": {"subset": chosen}})
    verdict = _ch7_receiver(ss)
    if not verdict.accepted or not s.third_party:
        return verdict
    return _envelope_zk(ss, receiver) or _ch7_third_party(ss)


def _ch7_publics(ss: _Session, sig: GroupSignature) -> Tuple[int, int]:
    publics = ss.transcript.last("publics").payload
    return publics["y_S"], publics["subsets"][sig.attachments["subset"]]["V_K"]


def _ch7_receiver(ss: _Session) -> Verdict:
    _, _, receiver, _ = _ch7_layout(ss.s)
    sig = _group_signature(ss.transcript.last("signature", to=receiver).payload)
    y_S, V_K = _ch7_publics(ss, sig)
    ss.record(R_R=envelope.receiver_recover(ss.params, sig, ss.s.key(receiver).x))
    if not multisig.ms7_verify(ss.params, sig, ss.s.key(receiver), y_S, V_K, ss.oracle):
        return Verdict("rejected", f"{receiver} rejeitou a multiassinatura")
    return ACCEPTED


def _ch7_third_party(ss: _Session) -> Verdict:
    _, _, receiver, _ = _ch7_layout(ss.s)
    sig = _group_signature(ss.transcript.last("signature", to=receiver).payload)
    y_S, V_K = _ch7_publics(ss, sig)
    return _envelope_third_party(ss, receiver, y_S, multisig.TAG_CH7, V_K)


# ===== Despacho =====

RUNNERS: Dict[str, Callable[[_Session], Verdict]] = {
    "ch1": _ch1_run,
    "ch1-tv": _tv_run,
    "ch1-tc": _tv_run,
    "ch2": _ch2_run,
    "ch3": _ch3_run,
    "ch4": _ch4_run,
    "ch5": _ch5_run,
    "ch6": _ch6_run,
    "ch7": _ch7_run,
}

# etapas de verificação, na ordem; a repetição usa só estas sobre a transcrição
CHECKS: Dict[str, Tuple[Callable[[_Session], Verdict], ...]] = {
    "ch1": (_ch1_receiver, _ch1_third_party),
    "ch1-tv": (_tv_members, _tv_combine),
    "ch1-tc": (_tv_members, _tv_combine),
    "ch2": (_ch2_receiver, _ch2_third_party),
    "ch3": (_ch3_receiver, _ch3_third_party),
    "ch4": (_ch4_verify,),
    "ch5": (_ch5_receiver, _ch5_third_party),
    "ch6": (_ch6_receiver, _ch6_third_party),
    "ch7": (_ch7_receiver, _ch7_third_party),
}


def run_scenario(scenario: Scenario) -> ScenarioResult:
    """
    Executa o cenário e devolve transcrição, valores calculados e veredito.

    Raises:
        FixtureMiss: a tabela de hash fixa não cobre a sessão (a primeira
            entrada ausente é informada antes de qualquer mensagem)
    """
    misses = scenario.missing_fixtures()
    if misses:
        log_error(f"[SESSAO] {scenario.name}: {len(misses)} hash(es) fixo(s) ausente(s); primeiro: {misses[0]}")
        raise misses[0]
    session = _Session(scenario)
    log_info(f"[SESSAO] Iniciando {scenario.name} ({scenario.scheme})")
    verdict = RUNNERS[scenario.scheme](session)
    log_info(f"[SESSAO] {scenario.name}: {verdict}")
    session.values["verdict"] = str(verdict)
    return ScenarioResult(verdict, session.transcript, session.values)


def replay_verdict(scenario: Scenario, transcript: SessionTranscript) -> Verdict:
    """Refaz apenas as verificações (atores verificadores) sobre a transcrição."""
    session = _Session(scenario, transcript)
    signatures = transcript.find("signature")
    if not signatures:
        last = transcript.envelopes[-1].sender if transcript.envelopes else None
        return Verdict("aborted", "sessão encerrada antes da assinatura", last)
    for stage in CHECKS[scenario.scheme]:
        try:
            verdict = stage(session)
        except ProtocolError as e:
            return Verdict("aborted", str(e))
        if not verdict.accepted:
            return verdict
    return ACCEPTED


# ===== Cenários-modelo =====

def template_scenario(scheme: str, params: GroupParams, seed: int = 0, message: bytes = b"mensagem",
                      third_party: bool = True) -> Dict[str, Any]:
    """
    Cenário mínimo com pontos pequenos; todo o resto sai da semente.
    Exige q > 7 (pontos públicos 1 a 6 e u_H = 7).
    """
    if scheme not in SCHEMES:
        raise ScenarioInvalid(f"esquema desconhecido: {scheme!r}")
    members = lambda prefix, n: [{"id": f"{prefix}{i}", "u": to_hex(i)} for i in range(1, n + 1)]
    layouts: Dict[str, Dict[str, Any]] = {
        "ch1": {"signer": "A", "receiver": "B"},
        "ch1-tv": {"signer": "A", "group": members("R", 4), "k": 3},
        "ch1-tc": {"signer": "A", "group": members("R", 4), "k": 3},
        "ch2": {"original": "A", "proxy": "B", "receiver": "C"},
        "ch3": {"members": members("M", 4), "t": 2, "receiver": "B"},
        "ch4": {"signers": members("S", 4), "t": 3, "verifiers": members("R", 3), "k": 2},
        "ch5": {"members": members("S", 5), "t": 3, "poly": None, "receiver": "R"},
        "ch6": {"members": members("S", 5), "t": 3, "receiver": "R"},
        "ch7": {"members": members("S", 5), "receiver": "R",
                "subsets": {"H": {"members": ["S1", "S3", "S5"], "u_H": to_hex(7)}}},
    }
    setup = dict(layouts[scheme])
    if scheme == "ch5":
        rng = random.Random(f"{seed}:template-poly")
        setup["poly"] = [to_hex(rng.randrange(1, params.q)) for _ in range(setup["t"])]
    if scheme == "ch6":
        rng = random.Random(f"{seed}:template-poly")
        for entry in setup["members"]:
            entry["poly"] = [to_hex(rng.randrange(params.q)) for _ in range(setup["t"])]
    if third_party:
        setup["third_party"] = "C" if scheme == "ch1" else "Y"
    return {
        "format_version": "1.0",
        "name": f"{scheme}-modelo-{seed}",
        "scheme": scheme,
        "params": {"p": to_hex(params.p), "q": to_hex(params.q), "g": to_hex(params.g)},
        "message": to_b64(message),
        "seed": seed,
        "hash": {"mode": "standard"},
        "setup": setup,
    }
