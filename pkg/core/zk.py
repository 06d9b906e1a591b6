# core/zk.py
"""
Protocolo interativo de confirmação: o provador convence um terceiro
designado de que log_μ Z = log_g y, sem revelar x.

Ordem das mensagens (qualquer outra ordem é rejeitada):
    1. verificador → provador: w = μ^u · g^v
    2. provador → verificador: β = w · g^α, γ = β^x
    3. verificador → provador: (u, v)      (provador confere w)
    4. provador → verificador: α           (verificador confere β, γ)
"""

import random
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from core.errors import OpeningMismatch, ProtocolOrderError
from core.group import Element, GroupParams, Scalar, default_rng
from core.logger import log_info


@dataclass(frozen=True)
class Statement:
    """Afirmação: existe x com Z = μ^x e y = g^x."""

    mu: int
    Z: int
    g: int
    y: int

    def check_range(self, params: GroupParams):
        for name in ("mu", "Z", "g", "y"):
            params.element(getattr(self, name))


class Phase(Enum):
    START = "start"
    COMMITTED = "committed"
    RESPONDED = "responded"
    OPENED = "opened"
    DONE = "done"


def _expect(current: Phase, wanted: Phase, step: str):
    if current is not wanted:
        raise ProtocolOrderError(f"{step} fora de ordem (fase atual: {current.value})")


class ConfirmationVerifier:
    """Lado do terceiro: escolhe (u, v), recebe (β, γ), revela e confere."""

    def __init__(self, params: GroupParams, statement: Statement,
                 u: Optional[int] = None, v: Optional[int] = None,
                 rng: Optional[random.Random] = None):
        statement.check_range(params)
        rng = rng or default_rng()
        self.params = params
        self.statement = statement
        self.u = Scalar(params.scalar(u) if u is not None else params.random_scalar(rng, nonzero=False))
        self.v = Scalar(params.scalar(v) if v is not None else params.random_scalar(rng, nonzero=False))
        self.w: Optional[Element] = None
        self.beta: Optional[int] = None
        self.gamma: Optional[int] = None
        self.phase = Phase.START

    def commit(self) -> Element:
        _expect(self.phase, Phase.START, "compromisso")
        st = self.statement
        self.w = self.params.mul(self.params.exp(st.mu, self.u), self.params.exp(st.g, self.v))
        self.phase = Phase.COMMITTED
        return self.w

    def receive_response(self, beta: int, gamma: int):
        _expect(self.phase, Phase.COMMITTED, "resposta")
        self.beta, self.gamma = beta, gamma
        self.phase = Phase.RESPONDED

    def reveal(self) -> Tuple[Scalar, Scalar]:
        _expect(self.phase, Phase.RESPONDED, "abertura")
        self.phase = Phase.OPENED
        return self.u, self.v

    def check(self, alpha: int) -> bool:
        """β ≟ μ^u·g^{v+α} e γ ≟ Z^u·y^{v+α}."""
        _expect(self.phase, Phase.OPENED, "verificação final")
        self.phase = Phase.DONE
        pr, st = self.params, self.statement
        expected_beta = pr.mul(pr.exp(st.mu, self.u), pr.exp(st.g, self.v + alpha))
        expected_gamma = pr.mul(pr.exp(st.Z, self.u), pr.exp(st.y, self.v + alpha))
        ok = self.beta == expected_beta and self.gamma == expected_gamma
        log_info(f"[ZK] Verificação final: {'aceita' if ok else 'rejeitada'}")
        return ok


class ConfirmationProver:
    """Lado do receptor: responde com a própria testemunha x."""

    def __init__(self, params: GroupParams, statement: Statement, x: int):
        self.params = params
        self.statement = statement
        self._x = x
        self.w: Optional[int] = None
        self.alpha: Optional[Scalar] = None
        self.phase = Phase.START

    def respond(self, w: int, alpha: Optional[int] = None,
                rng: Optional[random.Random] = None) -> Tuple[Element, Element]:
        _expect(self.phase, Phase.START, "resposta do provador")
        self.params.element(w)
        self.w = w
        self.alpha = self.params.scalar(alpha) if alpha is not None else self.params.random_scalar(rng or default_rng(), nonzero=False)
        beta = self.params.mul(w, self.params.exp(self.statement.g, self.alpha))
        gamma = self.params.exp(beta, self._x)
        self.phase = Phase.RESPONDED
        return beta, gamma

    def check_opening(self, u: int, v: int):
        """Recalcula w; aborta se o verificador trapaceou."""
        _expect(self.phase, Phase.RESPONDED, "conferência da abertura")
        st = self.statement
        w = self.params.mul(self.params.exp(st.mu, u), self.params.exp(st.g, v))
        if w != self.w:
            raise OpeningMismatch(f"w recalculado {w} ≠ w recebido {self.w}")
        self.phase = Phase.OPENED

    def final(self) -> Scalar:
        _expect(self.phase, Phase.OPENED, "envio de α")
        self.phase = Phase.DONE
        return self.alpha


@dataclass(frozen=True)
class ConfirmationTranscript:
    w: int
    beta: int
    gamma: int
    u: int
    v: int
    alpha: int
    accepted: bool


def run_confirmation(params: GroupParams, statement: Statement, x: int,
                     u: Optional[int] = None, v: Optional[int] = None,
                     alpha: Optional[int] = None,
                     rng: Optional[random.Random] = None) -> ConfirmationTranscript:
    """Executa as quatro mensagens em ordem entre um provador e um verificador honestos."""
    verifier = ConfirmationVerifier(params, statement, u, v, rng)
    prover = ConfirmationProver(params, statement, x)

    w = verifier.commit()
    beta, gamma = prover.respond(w, alpha, rng)
    verifier.receive_response(beta, gamma)
    opened_u, opened_v = verifier.reveal()
    prover.check_opening(opened_u, opened_v)
    final_alpha = prover.final()
    accepted = verifier.check(final_alpha)

    return ConfirmationTranscript(w, beta, gamma, opened_u, opened_v, final_alpha, accepted)
