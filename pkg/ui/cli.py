# ui/cli.py
"""
Interface de linha de comando do Kit de Assinaturas.

Códigos de saída: 0 aceito/sucesso, 1 rejeitado, 2 erro de uso ou de leitura.
"""

import argparse
import json
import random
import sys
from typing import Any, Dict, List, Optional, Tuple

from core.encoding import format_item, from_b64, from_hex, to_b64, to_hex
from core.errors import FixtureMiss, ProtocolError
from core.group import GroupParams, KeyPair, generate_params, keygen, validate_params
from core.hashing import HashOracle
from core.logger import log_error, log_info, log_startup, log_warning, set_console_level
from core.settings import get_setting
from harness.scenarios import SCHEMES, Scenario, load_scenario, replay_verdict, run_scenario, template_scenario
from harness.bus import SessionTranscript
from harness.vectors import get_vectors_report, run_vectors
from schemes import directed

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Entrada inválida do usuário (vira código de saída 2)."""


# ===== Arquivos =====

def _read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"não foi possível ler {path}: {e}") from e


def _write_output(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        log_info(f"[CLI] Saída gravada em {out}")
    else:
        print(text)


def _dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)


def _rng(seed: Optional[int]) -> Optional[random.Random]:
    return random.Random(seed) if seed is not None else None


def params_to_json(params: GroupParams) -> Dict[str, str]:
    return {"p": to_hex(params.p), "q": to_hex(params.q), "g": to_hex(params.g)}


def load_params(path: str) -> GroupParams:
    data = _read_json(path)
    try:
        return validate_params(from_hex(data["p"]), from_hex(data["q"]), from_hex(data["g"]))
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"{path}: parâmetros inválidos ({e})") from e


def load_key(path: str, need_secret: bool = False) -> Tuple[GroupParams, Optional[KeyPair], int]:
    """
    Lê um arquivo de chave {p, q, g, x?, y}.

    Returns:
        (parâmetros, par de chaves ou None, y)
    """
    params = load_params(path)
    data = _read_json(path)
    try:
        y = from_hex(data["y"])
        pair = keygen(params, x=from_hex(data["x"])) if "x" in data else None
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"{path}: chave inválida ({e})") from e
    if pair is not None and pair.y != y:
        raise UsageError(f"{path}: y não corresponde a g^x")
    if need_secret and pair is None:
        raise UsageError(f"{path}: é necessária a chave secreta (campo x)")
    return params, pair, y


def load_message(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"não foi possível ler a mensagem {path}: {e}") from e


def load_oracle(params: GroupParams, path: Optional[str]) -> HashOracle:
    if not path:
        return HashOracle.standard(params.q)
    data = _read_json(path)
    entries = data.get("fixtures", []) if isinstance(data, dict) else data
    return HashOracle.from_json(params.q, entries)


def signature_to_json(sig: directed.DirectedSignature, y_A: int) -> Dict[str, Any]:
    return {
        "scheme": "ch1",
        "fields": {"S_A": to_hex(sig.S_A), "W_B": to_hex(sig.W_B), "V_B": to_hex(sig.V_B)},
        "message": to_b64(sig.m),
        "attachments": {"y_A": to_hex(y_A)},
    }


def load_signature(path: str) -> Tuple[directed.DirectedSignature, Dict[str, Any]]:
    data = _read_json(path)
    try:
        if data["scheme"] != "ch1":
            raise UsageError(f"{path}: esquema {data['scheme']!r} não é assinatura individual (use 'scenario run')")
        fields = {k: from_hex(v) for k, v in data["fields"].items()}
        sig = directed.DirectedSignature(fields["S_A"], fields["W_B"], fields["V_B"], from_b64(data["message"]))
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"{path}: assinatura inválida ({e})") from e
    return sig, data.get("attachments", {})


def _signer_key(args: argparse.Namespace, attachments: Dict[str, Any]) -> int:
    if args.signer:
        return load_key(args.signer)[2]
    if "y_A" in attachments:
        return from_hex(attachments["y_A"])
    raise UsageError("informe --signer com a chave pública de quem assinou")


# ===== Subcomandos =====

def cmd_params_gen(args: argparse.Namespace) -> int:
    q_bits = args.q_bits or int(get_setting("smoke_q_bits"))
    p_bits = args.p_bits or int(get_setting("smoke_p_bits"))
    params = generate_params(q_bits, p_bits, _rng(args.seed))
    _write_output(_dumps(params_to_json(params)), args.out)
    return EXIT_OK


def cmd_params_check(args: argparse.Namespace) -> int:
    if args.params:
        data = _read_json(args.params)
        values = [data.get(k) for k in ("p", "q", "g")]
        parse = from_hex
    elif len(args.values) == 3:
        values = args.values
        parse = lambda text: int(text, 0)
    else:
        raise UsageError("informe --params FILE ou os três valores p q g")
    try:
        p, q, g = (parse(v) for v in values)
    except (TypeError, ValueError) as e:
        raise UsageError(f"valores inválidos: {e}") from e
    try:
        params = validate_params(p, q, g)
    except ProtocolError as e:
        print(f"inválido: {e}")
        return EXIT_REJECT
    print(f"válido: {params.describe()}")
    return EXIT_OK


def cmd_keygen(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    pair = keygen(params, _rng(args.seed))
    data = params_to_json(params)
    data.update(x=to_hex(pair.x), y=to_hex(pair.y))
    _write_output(_dumps(data), args.out)
    return EXIT_OK


def cmd_sign(args: argparse.Namespace) -> int:
    params, signer, y_A = load_key(args.key, need_secret=True)
    _, _, y_B = load_key(args.to)
    oracle = load_oracle(params, args.fixture)
    rng = _rng(args.seed) or random.SystemRandom()
    sig = directed.ds_sign(params, signer, y_B, load_message(args.message),
                           params.random_scalar(rng), params.random_scalar(rng), oracle)
    _write_output(_dumps(signature_to_json(sig, y_A)), args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    params, receiver, _ = load_key(args.key, need_secret=True)
    sig, attachments = load_signature(args.signature)
    ok = directed.ds_verify(params, sig, receiver, _signer_key(args, attachments), load_oracle(params, args.fixture))
    print("aceita" if ok else "rejeitada")
    return EXIT_OK if ok else EXIT_REJECT


def cmd_redesignate(args: argparse.Namespace) -> int:
    params, receiver, _ = load_key(args.key, need_secret=True)
    _, _, y_C = load_key(args.to)
    sig, attachments = load_signature(args.signature)
    y_A = _signer_key(args, attachments)
    if not directed.ds_verify(params, sig, receiver, y_A, load_oracle(params, args.fixture)):
        print("rejeitada: só uma assinatura aceita pode ser redesignada")
        return EXIT_REJECT
    rng = _rng(args.seed) or random.SystemRandom()
    R = directed.ds_recover(params, sig, receiver.x)
    moved = directed.ds_redesignate(params, sig, R, y_C, params.random_scalar(rng))
    _write_output(_dumps(signature_to_json(moved, y_A)), args.out)
    return EXIT_OK


def cmd_prove(args: argparse.Namespace) -> int:
    """Receptor confirma R com a prova de validade; o terceiro confere a assinatura com esse R."""
    params, receiver, _ = load_key(args.key, need_secret=True)
    sig, attachments = load_signature(args.signature)
    y_A = _signer_key(args, attachments)
    oracle = load_oracle(params, args.fixture)
    R, transcript = directed.ds_prove_validity(params, receiver, sig, rng=_rng(args.seed))
    try:
        r_A = oracle(directed.TAG_DS, [R, sig.m])
        signature_ok = params.gexp(sig.S_A) == params.mul(R, params.exp(y_A, r_A))
    except FixtureMiss as e:
        log_warning(f"[CLI] Hash ausente ao conferir a assinatura ({e}); assinatura rejeitada")
        signature_ok = False
    report = {
        "R": to_hex(R),
        "proof": {name: format_item(getattr(transcript, name)) for name in ("w", "beta", "gamma", "u", "v", "alpha")},
        "proof_accepted": transcript.accepted,
        "signature_accepted": signature_ok,
    }
    _write_output(_dumps(report), args.out)
    return EXIT_OK if transcript.accepted and signature_ok else EXIT_REJECT


def cmd_scenario_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.file)
    result = run_scenario(scenario)
    if args.out:
        _write_output(result.transcript.dumps(include_secret=not args.public), args.out)
    print(f"{scenario.name}: {result.verdict}")
    if args.values:
        for name, value in sorted(result.values.items()):
            shown = format_item(value) if isinstance(value, (int, bytes)) and not isinstance(value, bool) else value
            print(f"  {name} = {shown}")
    return EXIT_OK if result.verdict.accepted else EXIT_REJECT


def cmd_scenario_replay(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.file)
    transcript = SessionTranscript.from_json(_read_json(args.transcript))
    verdict = replay_verdict(scenario, transcript)
    print(f"{scenario.name}: {verdict}")
    return EXIT_OK if verdict.accepted else EXIT_REJECT


def cmd_scenario_template(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    data = template_scenario(args.scheme, params, seed=args.seed or 0)
    Scenario(data)
    _write_output(_dumps(data), args.out)
    return EXIT_OK


def cmd_vectors_check(args: argparse.Namespace) -> int:
    outcomes = run_vectors(args.path)
    print(get_vectors_report(outcomes))
    return EXIT_OK if outcomes and all(o.passed for o in outcomes) else EXIT_REJECT


# ===== Parser =====

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kit-assinaturas",
        description="Assinaturas dirigidas, de limiar e multiassinaturas sobre grupos de Schnorr.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="mostra o log INFO no console")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params-gen", help="gera (p, q, g)")
    p.add_argument("--q-bits", type=int)
    p.add_argument("--p-bits", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_params_gen)

    p = sub.add_parser("params-check", help="valida (p, q, g)")
    p.add_argument("values", nargs="*", help="p q g (decimal ou 0x...)")
    p.add_argument("--params")
    p.set_defaults(func=cmd_params_check)

    p = sub.add_parser("keygen", help="gera um par de chaves")
    p.add_argument("--params", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("sign", help="assinatura dirigida (cap. 1)")
    p.add_argument("--key", required=True, help="chave do signatário (com x)")
    p.add_argument("--to", required=True, help="chave pública do receptor")
    p.add_argument("--message", required=True, help="arquivo ou - para stdin")
    p.add_argument("--seed", type=int)
    p.add_argument("--fixture")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sign)

    for name, func, text in (("verify", cmd_verify, "verificação pelo receptor"),
                             ("redesignate", cmd_redesignate, "repasse da assinatura a um terceiro"),
                             ("prove", cmd_prove, "prova de validade para um terceiro")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--key", required=True, help="chave do receptor (com x)")
        p.add_argument("--signature", required=True)
        p.add_argument("--signer", help="chave pública de quem assinou (padrão: anexo y_A)")
        p.add_argument("--fixture")
        if name != "verify":
            p.add_argument("--seed", type=int)
            p.add_argument("--out")
        if name == "redesignate":
            p.add_argument("--to", required=True, help="chave pública do novo receptor")
        p.set_defaults(func=func)

    scenario = sub.add_parser("scenario", help="cenários multipartes")
    scenario_sub = scenario.add_subparsers(dest="action", required=True)
    p = scenario_sub.add_parser("run")
    p.add_argument("file")
    p.add_argument("--out", help="grava a transcrição")
    p.add_argument("--public", action="store_true", help="transcrição só com o canal aberto")
    p.add_argument("--values", action="store_true", help="lista os valores calculados")
    p.set_defaults(func=cmd_scenario_run)
    p = scenario_sub.add_parser("replay")
    p.add_argument("file")
    p.add_argument("transcript")
    p.set_defaults(func=cmd_scenario_replay)
    p = scenario_sub.add_parser("template")
    p.add_argument("scheme", choices=SCHEMES)
    p.add_argument("--params", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scenario_template)

    vectors = sub.add_parser("vectors", help="vetores de referência")
    vectors_sub = vectors.add_subparsers(dest="action", required=True)
    p = vectors_sub.add_parser("check")
    p.add_argument("path", nargs="?", help="arquivo ou pasta (padrão: data/vectors)")
    p.set_defaults(func=cmd_vectors_check)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    if args.verbose:
        set_console_level("INFO")
    log_startup()
    log_info(f"[CLI] Comando: {args.command} {getattr(args, 'action', '') or ''}".rstrip())

    try:
        return args.func(args)
    except (UsageError, ProtocolError, ValueError, OSError) as e:
        log_error(f"[CLI] {e}")
        print(f"erro: {e}", file=sys.stderr)
        return EXIT_USAGE
