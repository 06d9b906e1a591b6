# core/settings.py
"""
Configurações do Kit de Assinaturas.
Lê data/settings.json e completa com os valores padrão.
"""

import json
import os
from typing import Any, Dict, List, Optional

from packaging import version

from core.paths import SETTINGS_FILE


DEFAULT_SETTINGS: Dict[str, Any] = {
    "miller_rabin_rounds": 40,
    "generation_max_attempts": 100000,
    "blind_max_retries": 64,
    "console_log_level": "WARNING",
    "file_log_level": "INFO",
    "vector_format_version": "1.0",
    "smoke_q_bits": 160,
    "smoke_p_bits": 1024,
}

# Problemas encontrados ao ler o arquivo; registrados no log_startup()
LOAD_PROBLEMS: List[str] = []

_cache: Optional[Dict[str, Any]] = None


def load_settings(path: Optional[str] = None, reload: bool = False) -> Dict[str, Any]:
    """
    Carrega as configurações (arquivo sobre os padrões).

    Args:
        path (str): Caminho alternativo do settings.json
        reload (bool): Ignora o cache e relê o arquivo

    Returns:
        Dict[str, Any]: Configurações efetivas
    """
    global _cache
    if _cache is not None and not reload and path is None:
        return _cache

    settings = dict(DEFAULT_SETTINGS)
    target = path or SETTINGS_FILE

    if os.path.exists(target):
        try:
            with open(target, "r", encoding="utf-8") as f:
                data = json.load(f)
            unknown = sorted(set(data) - set(DEFAULT_SETTINGS))
            if unknown:
                LOAD_PROBLEMS.append(f"[CONFIG] Chaves desconhecidas ignoradas: {', '.join(unknown)}")
            settings.update({k: v for k, v in data.items() if k in DEFAULT_SETTINGS})
        except Exception as e:
            LOAD_PROBLEMS.append(f"[CONFIG] Erro ao ler {target}: {e} (usando padrões)")

    if path is None:
        _cache = settings
    return settings


def get_setting(key: str) -> Any:
    """
    Retorna uma configuração específica.

    Args:
        key (str): Nome da configuração

    Returns:
        Any: Valor configurado ou o padrão
    """
    return load_settings().get(key, DEFAULT_SETTINGS.get(key))


def is_format_supported(file_version: str) -> bool:
    """
    Verifica se a versão de formato de um arquivo de vetores/cenário é suportada.

    Regra: mesma versão major e não mais nova que a suportada.
    """
    try:
        supported = version.parse(str(get_setting("vector_format_version")))
        current = version.parse(str(file_version))
    except version.InvalidVersion:
        return False
    return current.major == supported.major and current <= supported
