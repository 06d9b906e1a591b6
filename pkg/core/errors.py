# core/errors.py
"""
Hierarquia de erros do Kit de Assinaturas.
Todo erro de protocolo deriva de ProtocolError; a CLI e os executores
de cenário/vetores convertem esses erros em veredito ou código de saída.
"""

from typing import Any, Optional


class ProtocolError(Exception):
    """Erro base de qualquer operação do kit."""


# ===== Parâmetros e aritmética =====

class NotPrime(ProtocolError):
    def __init__(self, which: str, value: int):
        super().__init__(f"{which} não é primo: {value}")
        self.which = which
        self.value = value


class OrderMismatch(ProtocolError):
    """q não divide p−1, ou g^q ≠ 1 mod p."""


class TrivialGenerator(ProtocolError):
    """g = 1 não gera o subgrupo."""


class GenerationTimeout(ProtocolError):
    """Geração de parâmetros excedeu o número máximo de tentativas."""


class NonInvertible(ProtocolError):
    """Escalar zero não possui inverso mod q."""


class ZeroSecret(ProtocolError):
    """Chave secreta fora de [1, q)."""


class FixtureMiss(ProtocolError):
    """Entrada ausente na tabela de hash fixa; a chave é reportada."""

    def __init__(self, tag: str, items: Any):
        super().__init__(f"hash fixo ausente para tag={tag!r} itens={items!r}")
        self.tag = tag
        self.items = items


# ===== Compartilhamento de segredo =====

class ZeroPoint(ProtocolError):
    """Ponto público u = 0 revelaria o segredo."""


class DuplicatePoints(ProtocolError):
    """Dois pontos coincidem mod q (denominador de Lagrange nulo)."""


class ShareOutOfRange(ProtocolError):
    """Valor desmascarado ≥ q: mascaramento corrompido ou chave errada."""


class SubsetPointCollision(ProtocolError):
    """Ponto do subconjunto autorizado coincide com um ponto do grupo."""


# ===== Protocolos =====

class OpeningMismatch(ProtocolError):
    """O verificador revelou (u, v) que não reproduz o compromisso w."""


class ProtocolOrderError(ProtocolError):
    """Mensagem entregue fora da ordem da máquina de estados."""


class DelegationCheckFailed(ProtocolError):
    """g^S ≠ y_A^r · r mod p na aceitação da delegação."""


class DecryptionMismatch(ProtocolError):
    """Etiqueta de integridade do criptossistema de limiar não confere."""


class PartialRejected(ProtocolError):
    """Assinatura parcial reprovada pelo combinador; identifica o signatário."""

    def __init__(self, signer: Any, reason: Optional[str] = None):
        super().__init__(f"assinatura parcial de {signer} rejeitada" + (f": {reason}" if reason else ""))
        self.signer = signer


# ===== Harness =====

class ScenarioInvalid(ProtocolError):
    """Cenário inconsistente (tamanhos, limiares, nonces ou fixtures)."""


class VectorParseError(ProtocolError):
    """Arquivo de vetores ilegível ou em formato não suportado."""
