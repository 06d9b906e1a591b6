# harness/bus.py
"""
Barramento de mensagens síncrono e determinístico entre os atores de uma sessão.

Canal "open": difusão ou mensagem direta que entra no registro público.
Canal "secret": mensagem ponto a ponto; fica na transcrição completa, mas
nunca na visão pública.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from core.encoding import format_item, parse_item
from core.errors import ProtocolOrderError, VectorParseError
from core.group import KeyPair
from core.logger import log_debug

OPEN = "open"
SECRET = "secret"


class Role(Enum):
    SDC = "SDC"
    CTC = "CTC"
    SIGNER = "Signer"
    PROXY = "Proxy"
    SHAREHOLDER = "Shareholder"
    COMBINER = "Combiner"
    RECEIVER = "Receiver"
    THIRD_PARTY = "ThirdParty"


def _encode(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, float):
        return value
    if isinstance(value, (int, bytes, bytearray)):
        return format_item(value)
    if isinstance(value, str):
        return "s:" + value
    if isinstance(value, dict):
        return {str(k): _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    raise TypeError(f"valor não serializável no barramento: {type(value).__name__}")


def _decode(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, str):
        return value[2:] if value.startswith("s:") else parse_item(value)
    if isinstance(value, dict):
        return {k: _decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    return value


@dataclass(frozen=True)
class Envelope:
    seq: int
    sender: str
    to: Optional[str]          # None = difusão
    channel: str
    kind: str
    payload: Dict[str, Any]

    def to_json(self) -> Dict[str, Any]:
        return {
            "seq": self.seq,
            "from": self.sender,
            "to": self.to if self.to is not None else "*",
            "channel": self.channel,
            "kind": self.kind,
            "payload": _encode(self.payload),
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Envelope":
        to = data["to"]
        return cls(data["seq"], data["from"], None if to == "*" else to,
                   data["channel"], data["kind"], _decode(data["payload"]))


@dataclass
class Actor:
    id: str
    role: Role
    keys: Optional[KeyPair] = None
    inbox: List[Envelope] = field(default_factory=list)


class SessionTranscript:
    """Registro ordenado de todas as mensagens de uma sessão, mais o livro de assinaturas."""

    def __init__(self, envelopes: Optional[List[Envelope]] = None,
                 ledger: Optional[List[Dict[str, Any]]] = None):
        self.envelopes: List[Envelope] = list(envelopes or [])
        self.ledger: List[Dict[str, Any]] = list(ledger or [])

    def append(self, envelope: Envelope):
        if self.envelopes and envelope.seq <= self.envelopes[-1].seq:
            raise ProtocolOrderError("seq deve ser estritamente crescente")
        self.envelopes.append(envelope)

    def record_signature(self, scheme: str, issuer: str, fields: Dict[str, Any]):
        """Guarda a assinatura emitida para resolução de disputas (somente acréscimo)."""
        self.ledger.append({"scheme": scheme, "issuer": issuer, "fields": dict(fields)})

    def open_view(self) -> List[Envelope]:
        return [e for e in self.envelopes if e.channel == OPEN]

    def find(self, kind: str, to: Optional[str] = None, sender: Optional[str] = None) -> List[Envelope]:
        return [
            e for e in self.envelopes
            if e.kind == kind and (to is None or e.to == to or e.to is None)
            and (sender is None or e.sender == sender)
        ]

    def last(self, kind: str, to: Optional[str] = None, sender: Optional[str] = None) -> Envelope:
        found = self.find(kind, to, sender)
        if not found:
            raise ProtocolOrderError(f"mensagem '{kind}' ausente na transcrição")
        return found[-1]

    def to_json(self, include_secret: bool = True) -> Dict[str, Any]:
        envelopes = self.envelopes if include_secret else self.open_view()
        return {
            "envelopes": [e.to_json() for e in envelopes],
            "ledger": [_encode(entry) for entry in self.ledger],
        }

    def dumps(self, include_secret: bool = True) -> str:
        return json.dumps(self.to_json(include_secret), sort_keys=True, indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "SessionTranscript":
        try:
            envelopes = [Envelope.from_json(e) for e in data["envelopes"]]
            ledger = [_decode(entry) for entry in data.get("ledger", [])]
        except (KeyError, TypeError, ValueError) as e:
            raise VectorParseError(f"transcrição inválida: {e}") from e
        return cls(envelopes, ledger)


class MessageBus:
    """Entrega síncrona, em ordem de envio; cada envio recebe o próximo seq."""

    def __init__(self):
        self.actors: Dict[str, Actor] = {}
        self.transcript = SessionTranscript()
        self._seq = 0

    def register(self, actor: Actor) -> Actor:
        if actor.id in self.actors:
            raise ValueError(f"ator duplicado: {actor.id}")
        self.actors[actor.id] = actor
        return actor

    def actor(self, actor_id: str) -> Actor:
        return self.actors[actor_id]

    def send(self, sender: str, to: Optional[str], kind: str, payload: Dict[str, Any],
             channel: str = OPEN) -> Envelope:
        if channel == SECRET and to is None:
            raise ValueError("canal secreto exige destinatário")
        if to is not None and to not in self.actors:
            raise ValueError(f"destinatário desconhecido: {to}")
        self._seq += 1
        envelope = Envelope(self._seq, sender, to, channel, kind, dict(payload))
        self.transcript.append(envelope)
        targets = [to] if to is not None else [a for a in self.actors if a != sender]
        for target in targets:
            self.actors[target].inbox.append(envelope)
        log_debug(f"[SESSAO] #{envelope.seq} {sender} → {to or '*'} ({channel}) {kind}")
        return envelope

    def broadcast(self, sender: str, kind: str, payload: Dict[str, Any]) -> Envelope:
        return self.send(sender, None, kind, payload, OPEN)

    def take(self, actor_id: str, kind: str, sender: Optional[str] = None) -> Dict[str, Any]:
        """Retira da caixa do ator a primeira mensagem do tipo pedido."""
        inbox = self.actors[actor_id].inbox
        for idx, envelope in enumerate(inbox):
            if envelope.kind == kind and (sender is None or envelope.sender == sender):
                return inbox.pop(idx).payload
        raise ProtocolOrderError(f"{actor_id} não recebeu '{kind}'" + (f" de {sender}" if sender else ""))
