# core/encoding.py
"""
Codificações do kit: hexadecimal big-endian para inteiros em arquivos,
base64 para mensagens e a codificação canônica usada pelo hash.
"""

import base64
import binascii
from typing import Iterable, Union

Item = Union[int, bytes, str]


def to_hex(value: int) -> str:
    """Inteiro não negativo → hex minúsculo sem prefixo."""
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValueError(f"valor não representável em hex: {value!r}")
    return format(value, "x")


def from_hex(text: str) -> int:
    """Hex (com ou sem 0x) → inteiro."""
    if not isinstance(text, str):
        raise ValueError(f"esperado texto hex, recebido {type(text).__name__}")
    body = text.strip().lower()
    if body.startswith("0x"):
        body = body[2:]
    if not body:
        raise ValueError("texto hex vazio")
    return int(body, 16)


def to_b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def from_b64(text: str) -> bytes:
    try:
        return base64.b64decode(text.encode("ascii"), validate=True)
    except (binascii.Error, UnicodeEncodeError) as e:
        raise ValueError(f"base64 inválido: {e}") from e


def int_to_bytes(value: int) -> bytes:
    """Magnitude big-endian mínima; zero vira um único byte 0x00."""
    if value < 0:
        raise ValueError("inteiros negativos não têm codificação canônica")
    return value.to_bytes(max(1, (value.bit_length() + 7) // 8), "big")


def item_bytes(item: Item) -> bytes:
    if isinstance(item, bool):
        raise ValueError("booleanos não são itens de hash")
    if isinstance(item, int):
        return int_to_bytes(item)
    if isinstance(item, (bytes, bytearray)):
        return bytes(item)
    if isinstance(item, str):
        return item.encode("utf-8")
    raise ValueError(f"item de hash não suportado: {type(item).__name__}")


def canonical_encoding(tag: str, items: Iterable[Item]) -> bytes:
    """
    tag ASCII ‖ Σ (comprimento em 4 bytes big-endian ‖ magnitude).

    Args:
        tag (str): Etiqueta de domínio (ex.: "ch1")
        items: Elementos, escalares (int) ou bytes da mensagem

    Returns:
        bytes: Codificação bit-exata
    """
    out = bytearray(tag.encode("ascii"))
    for item in items:
        raw = item_bytes(item)
        out += len(raw).to_bytes(4, "big")
        out += raw
    return bytes(out)


def format_item(item: Item) -> str:
    """Item → texto de arquivo: inteiros em hex, bytes como "b64:..."."""
    if isinstance(item, int) and not isinstance(item, bool):
        return to_hex(item)
    if isinstance(item, str):
        item = item.encode("utf-8")
    return "b64:" + to_b64(bytes(item))


def parse_item(text: str) -> Item:
    """Inverso de format_item."""
    if text.startswith("b64:"):
        return from_b64(text[4:])
    return from_hex(text)
