# core/hashing.py
"""
Oráculo de hash h dos esquemas.

Modo "standard": SHA-256 da codificação canônica, lido como inteiro
big-endian e reduzido mod q. Modo "fixture": tabela fixa indexada pela
codificação canônica; uma entrada ausente gera FixtureMiss (nunca adivinha).
"""

import hashlib
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from core.encoding import Item, canonical_encoding, format_item, from_hex, parse_item
from core.errors import FixtureMiss, VectorParseError
from core.group import Scalar

STANDARD = "standard"
FIXTURE = "fixture"


class HashOracle:
    """Hash injetável: padrão (SHA-256) ou tabela fixa para os vetores."""

    def __init__(self, q: int, mode: str = STANDARD):
        if mode not in (STANDARD, FIXTURE):
            raise ValueError(f"modo de hash desconhecido: {mode}")
        self.q = q
        self.mode = mode
        self._table: Dict[bytes, int] = {}
        # só na cópia de pré-conferência: entradas ausentes, na ordem da consulta
        self.misses: Optional[List[FixtureMiss]] = None

    @classmethod
    def standard(cls, q: int) -> "HashOracle":
        return cls(q, STANDARD)

    @classmethod
    def fixture(cls, q: int, entries: Iterable[Tuple[str, Sequence[Item], int]] = ()) -> "HashOracle":
        oracle = cls(q, FIXTURE)
        for tag, items, out in entries:
            oracle.add(tag, items, out)
        return oracle

    @classmethod
    def from_json(cls, q: int, entries: List[Dict]) -> "HashOracle":
        """Entradas no formato {"tag": str, "items": [hex|b64:...], "out": hex}."""
        oracle = cls(q, FIXTURE)
        for i, entry in enumerate(entries):
            try:
                items = [parse_item(text) for text in entry["items"]]
                oracle.add(entry["tag"], items, from_hex(entry["out"]))
            except (KeyError, TypeError, ValueError) as e:
                raise VectorParseError(f"entrada de fixture #{i} inválida: {e}") from e
        return oracle

    def recording(self) -> "HashOracle":
        """
        Cópia que anota as entradas ausentes em vez de falhar.

        Uma entrada ausente responde com o hash padrão; só a primeira falta
        é garantidamente a mesma de uma execução real.
        """
        copy = HashOracle(self.q, self.mode)
        copy._table = self._table
        copy.misses = []
        return copy

    def add(self, tag: str, items: Sequence[Item], out: int):
        key = canonical_encoding(tag, items)
        self._table[key] = out % self.q

    def digest(self, tag: str, items: Sequence[Item]) -> bytes:
        """SHA-256 bruto da codificação canônica (independe do modo)."""
        return hashlib.sha256(canonical_encoding(tag, items)).digest()

    def hash_to_scalar(self, tag: str, items: Sequence[Item]) -> Scalar:
        items = tuple(items)
        if self.mode == FIXTURE:
            key = canonical_encoding(tag, items)
            if key in self._table:
                return Scalar(self._table[key])
            miss = FixtureMiss(tag, [format_item(it) for it in items])
            if self.misses is None:
                raise miss
            self.misses.append(miss)
        value = int.from_bytes(self.digest(tag, items), "big") % self.q
        return Scalar(value)

    __call__ = hash_to_scalar
