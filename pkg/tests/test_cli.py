import json

import pytest

from ui.cli import main, params_to_json


@pytest.fixture
def params_file(tmp_path, group):
    path = tmp_path / "params.json"
    path.write_text(json.dumps(params_to_json(group)), encoding="utf-8")
    return str(path)


@pytest.fixture
def keys(tmp_path, params_file):
    paths = {}
    for seed, name in enumerate(("A", "B", "C"), start=1):
        paths[name] = str(tmp_path / f"{name}.json")
        assert main(["keygen", "--params", params_file, "--seed", str(seed), "--out", paths[name]]) == 0
    return paths


@pytest.fixture
def signed(tmp_path, keys):
    message = tmp_path / "msg.txt"
    message.write_bytes(b"pagar 100 moedas")
    sig = str(tmp_path / "sig.json")
    code = main(["sign", "--key", keys["A"], "--to", keys["B"], "--message", str(message),
                 "--seed", "9", "--out", sig])
    assert code == 0
    return sig


class TestParams:
    def test_check_valid(self, capsys):
        assert main(["params-check", "23", "11", "3"]) == 0
        assert "válido" in capsys.readouterr().out

    def test_check_accepts_hex_prefix(self):
        assert main(["params-check", "0x17", "0xb", "0x3"]) == 0

    def test_check_invalid(self, capsys):
        assert main(["params-check", "23", "11", "5"]) == 1
        assert "inválido" in capsys.readouterr().out

    def test_check_garbage(self):
        assert main(["params-check", "zz", "11", "3"]) == 2

    def test_check_needs_values(self):
        assert main(["params-check", "23"]) == 2

    def test_generate_then_check(self, tmp_path):
        out = str(tmp_path / "gen.json")
        assert main(["params-gen", "--q-bits", "16", "--p-bits", "64", "--seed", "1", "--out", out]) == 0
        data = json.loads(open(out, encoding="utf-8").read())
        assert set(data) == {"p", "q", "g"}
        assert main(["params-check", "--params", out]) == 0


class TestDirectedFlow:
    def test_key_file_layout(self, keys):
        data = json.loads(open(keys["A"], encoding="utf-8").read())
        assert set(data) == {"p", "q", "g", "x", "y"}

    def test_receiver_accepts(self, keys, signed, capsys):
        assert main(["verify", "--key", keys["B"], "--signature", signed]) == 0
        assert capsys.readouterr().out.strip().endswith("aceita")

    def test_other_party_rejects(self, keys, signed):
        assert main(["verify", "--key", keys["C"], "--signature", signed]) == 1

    def test_wrong_signer_key_rejects(self, keys, signed):
        assert main(["verify", "--key", keys["B"], "--signature", signed, "--signer", keys["C"]]) == 1

    def test_redesignate_to_third_party(self, tmp_path, keys, signed):
        moved = str(tmp_path / "moved.json")
        assert main(["redesignate", "--key", keys["B"], "--to", keys["C"], "--signature", signed,
                     "--seed", "4", "--out", moved]) == 0
        assert main(["verify", "--key", keys["C"], "--signature", moved]) == 0
        assert main(["verify", "--key", keys["B"], "--signature", moved]) == 1

    def test_validity_proof(self, tmp_path, keys, signed):
        out = str(tmp_path / "proof.json")
        assert main(["prove", "--key", keys["B"], "--signature", signed, "--seed", "2", "--out", out]) == 0
        report = json.loads(open(out, encoding="utf-8").read())
        assert report["proof_accepted"] and report["signature_accepted"]
        assert set(report["proof"]) == {"w", "beta", "gamma", "u", "v", "alpha"}

    def test_validity_proof_with_missing_fixture_rejects(self, tmp_path, keys, signed):
        table = tmp_path / "fixtures.json"
        table.write_text(json.dumps({"fixtures": []}), encoding="utf-8")
        out = str(tmp_path / "proof.json")
        code = main(["prove", "--key", keys["B"], "--signature", signed, "--fixture", str(table),
                     "--seed", "2", "--out", out])
        assert code == 1
        report = json.loads(open(out, encoding="utf-8").read())
        assert report["proof_accepted"] and not report["signature_accepted"]

    def test_signing_needs_secret_key(self, tmp_path, keys):
        public_only = tmp_path / "pub.json"
        data = json.loads(open(keys["A"], encoding="utf-8").read())
        del data["x"]
        public_only.write_text(json.dumps(data), encoding="utf-8")
        message = tmp_path / "m.txt"
        message.write_bytes(b"x")
        assert main(["sign", "--key", str(public_only), "--to", keys["B"], "--message", str(message)]) == 2

    def test_missing_file(self, keys):
        assert main(["verify", "--key", keys["B"], "--signature", "/nao/existe.json"]) == 2


class TestScenarioCommands:
    def test_template_run_replay(self, tmp_path, params_file, capsys):
        scenario = str(tmp_path / "ch3.json")
        transcript = str(tmp_path / "ch3-transcript.json")
        assert main(["scenario", "template", "ch3", "--params", params_file, "--out", scenario]) == 0
        assert main(["scenario", "run", scenario, "--out", transcript]) == 0
        assert "accepted" in capsys.readouterr().out
        assert main(["scenario", "replay", scenario, transcript]) == 0

    def test_public_transcript_omits_secret_channel(self, tmp_path, params_file):
        scenario = str(tmp_path / "ch2.json")
        transcript = str(tmp_path / "public.json")
        assert main(["scenario", "template", "ch2", "--params", params_file, "--out", scenario]) == 0
        assert main(["scenario", "run", scenario, "--out", transcript, "--public"]) == 0
        envelopes = json.loads(open(transcript, encoding="utf-8").read())["envelopes"]
        assert envelopes and all(e["channel"] == "open" for e in envelopes)

    def test_rejected_run_exit_code(self, tmp_path, params_file):
        scenario = tmp_path / "bad.json"
        assert main(["scenario", "template", "ch1", "--params", params_file, "--out", str(scenario)]) == 0
        data = json.loads(scenario.read_text(encoding="utf-8"))
        data["faults"] = [{"kind": "tamper_field", "field": "S_A"}]
        scenario.write_text(json.dumps(data), encoding="utf-8")
        assert main(["scenario", "run", str(scenario)]) == 1

    def test_invalid_scenario(self, tmp_path):
        scenario = tmp_path / "broken.json"
        scenario.write_text(json.dumps({"scheme": "ch1"}), encoding="utf-8")
        assert main(["scenario", "run", str(scenario)]) == 2


def test_vectors_check(capsys):
    assert main(["vectors", "check"]) == 0
    assert "7/7 vetores conferem" in capsys.readouterr().out


def test_unknown_command():
    assert main(["assinar-tudo"]) == 2
