# harness/vectors.py
"""
Vetores de referência: cada arquivo em data/vectors/ traz um cenário, os
valores esperados, os valores impressos na fonte e as erratas conhecidas.

Diferença em `expected` reprova o vetor; diferença em `printed` vira apenas
anotação de auditoria (o valor impresso não confere com o recalculado).
"""

import json
import os
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional

from core.encoding import format_item
from core.errors import ProtocolError, ScenarioInvalid, VectorParseError
from core.logger import log_error, log_info, log_warning
from core.paths import VECTORS_DIR
from core.settings import is_format_supported
from harness.bus import SessionTranscript
from harness.scenarios import Scenario, replay_verdict, run_scenario


@dataclass
class VectorOutcome:
    name: str
    description: str = ""
    passed: bool = False
    verdict: str = ""
    failures: List[str] = field(default_factory=list)
    annotations: List[str] = field(default_factory=list)
    errata: List[str] = field(default_factory=list)


def _normalize(value: Any) -> str:
    if isinstance(value, (int, bytes, bytearray)) and not isinstance(value, bool):
        return format_item(value)
    return str(value)


def load_vector_file(path: str) -> Dict[str, Any]:
    """
    Lê um arquivo de vetores e confere a versão de formato.

    Raises:
        VectorParseError: JSON inválido, campos ausentes ou versão incompatível
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise VectorParseError(f"não foi possível ler {path}: {e}") from e

    if not isinstance(data, dict) or "scenario" not in data or "expected" not in data:
        raise VectorParseError(f"{path}: faltam 'scenario' ou 'expected'")
    fmt = str(data.get("format_version", ""))
    if not is_format_supported(fmt):
        raise VectorParseError(f"{path}: versão de formato não suportada ({fmt or 'ausente'})")
    data.setdefault("name", os.path.splitext(os.path.basename(path))[0])
    return data


def list_vector_files(directory: Optional[str] = None) -> List[str]:
    """Arquivos .json da pasta de vetores, em ordem alfabética."""
    directory = directory or VECTORS_DIR
    if not os.path.isdir(directory):
        log_warning(f"[VETORES] Pasta {directory} não encontrada")
        return []
    return sorted(
        os.path.join(directory, name) for name in os.listdir(directory) if name.endswith(".json")
    )


def check_vector(data: Dict[str, Any]) -> VectorOutcome:
    """Executa o cenário do vetor, compara os valores e repete o veredito pela transcrição."""
    outcome = VectorOutcome(data["name"], data.get("description", ""), errata=list(data.get("errata", [])))
    try:
        scenario = Scenario(data["scenario"], name=data["name"])
        result = run_scenario(scenario)
    except (ScenarioInvalid, VectorParseError) as e:
        raise VectorParseError(f"{data['name']}: {e}") from e
    except ProtocolError as e:
        outcome.failures.append(f"execução interrompida: {e}")
        log_error(f"[VETORES] {data['name']}: {e}")
        return outcome

    values = result.values
    outcome.verdict = str(result.verdict)
    for name, want in data["expected"].items():
        if name not in values:
            outcome.failures.append(f"{name}: valor não produzido pela execução")
            continue
        got = _normalize(values[name])
        if got != str(want):
            outcome.failures.append(f"{name}: esperado {want}, obtido {got}")

    for name, shown in data.get("printed", {}).items():
        got = _normalize(values.get(name, "?"))
        if got != str(shown):
            outcome.annotations.append(f"{name}: impresso {shown}, recalculado {got}")

    # o veredito tem de sair igual só a partir da transcrição serializada
    replayed = replay_verdict(scenario, SessionTranscript.from_json(json.loads(result.transcript.dumps())))
    if replayed != result.verdict:
        outcome.failures.append(f"repetição pela transcrição divergiu: {replayed} ≠ {result.verdict}")

    outcome.passed = not outcome.failures
    log_info(f"[VETORES] {outcome.name}: {'ok' if outcome.passed else 'FALHOU'} "
             f"({len(outcome.annotations)} anotações)")
    return outcome


def run_vectors(path: Optional[str] = None) -> List[VectorOutcome]:
    """
    Confere um arquivo de vetores ou todos os da pasta.

    Args:
        path (str): Arquivo .json ou pasta (padrão: data/vectors)

    Returns:
        List[VectorOutcome]: Um resultado por vetor
    """
    if path and os.path.isfile(path):
        files = [path]
    else:
        files = list_vector_files(path)
    log_info(f"[VETORES] Conferindo {len(files)} arquivo(s)")
    return [check_vector(load_vector_file(f)) for f in files]


def get_vectors_report(outcomes: List[VectorOutcome]) -> str:
    """
    Gera o relatório textual da conferência.

    Returns:
        str: Relatório formatado
    """
    lines = ["=== RELATÓRIO DE VETORES ===",
             f"Data/Hora: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}",
             ""]

    for outcome in outcomes:
        status_emoji = "✅" if outcome.passed else "⚠️"
        lines.append(f"{status_emoji} {outcome.name}: {outcome.verdict or 'sem veredito'}")
        for failure in outcome.failures:
            lines.append(f"    ✗ {failure}")
        for note in outcome.annotations:
            lines.append(f"    · {note}")
        for note in outcome.errata:
            lines.append(f"    errata: {note}")

    passed = sum(1 for o in outcomes if o.passed)
    lines.append("")
    summary_emoji = "✅" if passed == len(outcomes) else "⚠️"
    lines.append(f"{summary_emoji} {passed}/{len(outcomes)} vetores conferem")
    lines.append("=" * 40)
    return "\n".join(lines)
