import json

import pytest

from core.encoding import format_item, to_hex
from core.errors import FixtureMiss, ProtocolOrderError, ScenarioInvalid
from harness.bus import OPEN, SECRET, Actor, Envelope, MessageBus, Role, SessionTranscript
from harness.scenarios import (
    SCHEMES,
    SIGNATURE_FIELDS,
    Scenario,
    Verdict,
    replay_verdict,
    run_scenario,
    template_scenario,
)


def _run(group, scheme, seed=0, faults=None, **overrides):
    data = template_scenario(scheme, group, seed=seed)
    data["setup"].update(overrides)
    if faults:
        data["faults"] = faults
    scenario = Scenario(data)
    return scenario, run_scenario(scenario)


def _replayed(scenario, result):
    return replay_verdict(scenario, SessionTranscript.from_json(json.loads(result.transcript.dumps())))


class TestBus:
    def _bus(self):
        bus = MessageBus()
        for actor_id in ("A", "B", "C"):
            bus.register(Actor(actor_id, Role.SHAREHOLDER))
        return bus

    def test_broadcast_reaches_everyone_else(self):
        bus = self._bus()
        bus.broadcast("A", "hello", {"x": 1})
        assert [len(bus.actor(a).inbox) for a in ("A", "B", "C")] == [0, 1, 1]

    def test_secret_channel_needs_recipient(self):
        with pytest.raises(ValueError):
            self._bus().send("A", None, "share", {"x": 1}, SECRET)

    def test_secret_messages_stay_out_of_open_view(self):
        bus = self._bus()
        bus.send("A", "B", "share", {"x": 7}, SECRET)
        bus.send("A", "C", "note", {"x": 8}, OPEN)
        assert [e.kind for e in bus.transcript.open_view()] == ["note"]
        public = bus.transcript.to_json(include_secret=False)
        assert [e["kind"] for e in public["envelopes"]] == ["note"]

    def test_take_missing_message(self):
        with pytest.raises(ProtocolOrderError):
            self._bus().take("B", "share")

    def test_duplicate_actor(self):
        bus = self._bus()
        with pytest.raises(ValueError):
            bus.register(Actor("A", Role.SIGNER))

    def test_sequence_must_increase(self):
        transcript = SessionTranscript()
        transcript.append(Envelope(2, "A", None, OPEN, "x", {}))
        with pytest.raises(ProtocolOrderError):
            transcript.append(Envelope(2, "A", None, OPEN, "y", {}))

    def test_payload_survives_serialization(self):
        bus = self._bus()
        bus.send("A", "B", "mixed", {"n": 255, "m": b"\x00\x01", "name": "S1", "list": [1, 2], "ok": True})
        restored = SessionTranscript.from_json(json.loads(bus.transcript.dumps()))
        assert restored.envelopes[0].payload == {"n": 255, "m": b"\x00\x01", "name": "S1", "list": [1, 2], "ok": True}


class TestScenarioValidation:
    def test_unknown_scheme(self, group):
        data = template_scenario("ch1", group)
        data["scheme"] = "ch9"
        with pytest.raises(ScenarioInvalid):
            Scenario(data)

    def test_template_rejects_unknown_scheme(self, group):
        with pytest.raises(ScenarioInvalid):
            template_scenario("ch0", group)

    def test_unsupported_format(self, group):
        data = template_scenario("ch1", group)
        data["format_version"] = "2.0"
        with pytest.raises(ScenarioInvalid):
            Scenario(data)

    def test_invalid_params(self, group):
        data = template_scenario("ch1", group)
        data["params"]["p"] = "19"
        with pytest.raises(ScenarioInvalid):
            Scenario(data)

    def test_threshold_larger_than_group(self, group):
        data = template_scenario("ch3", group)
        data["setup"]["t"] = 5
        with pytest.raises(ScenarioInvalid):
            Scenario(data)

    def test_subset_of_wrong_size(self, group):
        data = template_scenario("ch5", group)
        data["setup"]["subset"] = ["S1", "S2"]
        with pytest.raises(ScenarioInvalid):
            Scenario(data)

    def test_unknown_fault(self, group):
        data = template_scenario("ch1", group)
        data["faults"] = [{"kind": "drop_message"}]
        with pytest.raises(ScenarioInvalid):
            Scenario(data)

    def test_missing_layout(self, group):
        data = template_scenario("ch4", group)
        del data["setup"]["verifiers"]
        with pytest.raises(ScenarioInvalid):
            Scenario(data)

    def test_fixture_miss_surfaces(self, group):
        data = template_scenario("ch1", group)
        data["hash"] = {"mode": "fixture", "fixtures": []}
        with pytest.raises(FixtureMiss):
            run_scenario(Scenario(data))

    def test_missing_fixtures_are_listed_before_running(self, group):
        data = template_scenario("ch1", group)
        data["hash"] = {"mode": "fixture", "fixtures": []}
        scenario = Scenario(data)
        misses = scenario.missing_fixtures()
        assert misses and misses[0].tag == "ch1"
        with pytest.raises(FixtureMiss) as raised:
            run_scenario(scenario)
        assert str(raised.value) == str(misses[0])

    def test_complete_table_has_no_missing_fixtures(self, group):
        # cap. 1 consulta o hash só com (R, m), na assinatura e nas duas verificações
        _, result = _run(group, "ch1")
        items = [result.values["R"], b"mensagem"]
        data = template_scenario("ch1", group)
        out = Scenario(data).oracle("ch1", items)
        data["hash"] = {"mode": "fixture", "fixtures": [
            {"tag": "ch1", "items": [format_item(it) for it in items], "out": to_hex(out)},
        ]}
        scenario = Scenario(data)
        assert scenario.missing_fixtures() == []
        assert run_scenario(scenario).verdict.accepted

    def test_standard_mode_needs_no_table(self, group):
        assert Scenario(template_scenario("ch6", group)).missing_fixtures() == []


@pytest.mark.parametrize("scheme", SCHEMES)
def test_honest_sessions_are_accepted(group, scheme):
    scenario, result = _run(group, scheme)
    assert result.verdict.accepted, str(result.verdict)
    assert result.values["verdict"] == "accepted"
    assert _replayed(scenario, result) == result.verdict
    assert len(result.transcript.find("signature")) == 1
    assert len(result.transcript.ledger) == 1


@pytest.mark.parametrize("scheme", SCHEMES)
def test_honest_sessions_over_small_groups(small_groups, scheme):
    for trial, params in enumerate(small_groups):
        result = run_scenario(Scenario(template_scenario(scheme, params, seed=trial)))
        assert result.verdict.accepted, f"{scheme} #{trial} ({params.describe()}): {result.verdict}"


@pytest.mark.parametrize("scheme", ["ch1", "ch3", "ch5"])
def test_same_seed_same_transcript(group, scheme):
    _, first = _run(group, scheme, seed=5)
    _, second = _run(group, scheme, seed=5)
    _, other = _run(group, scheme, seed=6)
    assert first.transcript.dumps() == second.transcript.dumps()
    assert first.transcript.dumps() != other.transcript.dumps()


def test_threshold_encryption_recovers_plaintext(group):
    _, result = _run(group, "ch1-tc")
    assert result.values["plaintext"] == b"mensagem"


def test_shares_never_appear_in_public_view(group):
    _, result = _run(group, "ch3")
    public = result.transcript.dumps(include_secret=False)
    full = result.transcript.dumps()
    for member in ("M1", "M2", "M3", "M4"):
        share = format_item(result.values[f"share[{member}]"])
        assert f'"{share}"' in full
        assert f'"{share}"' not in public


def test_delegation_key_is_secret(group):
    _, result = _run(group, "ch2")
    kinds = {e.kind for e in result.transcript.open_view()}
    assert "delegation-key" not in kinds
    assert "delegation-commit" in kinds


class TestFaults:
    def test_corrupt_partial_is_traced_to_signer(self, group):
        scenario, result = _run(group, "ch5", faults=[{"kind": "corrupt_partial", "actor": "S2"}])
        assert result.verdict.status == "aborted"
        assert result.verdict.actor == "S2"
        assert not result.transcript.find("signature")
        assert _replayed(scenario, result).status == "aborted"

    def test_corrupt_partial_in_dealerless_group(self, group):
        _, result = _run(group, "ch6", faults=[{"kind": "corrupt_partial", "actor": "S3"}])
        assert result.verdict == Verdict("aborted", result.verdict.reason, "S3")

    def test_corrupt_partial_without_combiner_check(self, group):
        scenario, result = _run(group, "ch3", faults=[{"kind": "corrupt_partial", "actor": "M1"}])
        assert result.verdict.status == "rejected"
        assert _replayed(scenario, result) == result.verdict

    def test_corrupt_delegation_key(self, group):
        _, result = _run(group, "ch2", faults=[{"kind": "corrupt_partial", "actor": "A"}])
        assert result.verdict.status == "aborted"
        assert result.verdict.actor == "B"

    @pytest.mark.parametrize("scheme, member", [("ch4", "R1"), ("ch1-tv", "R2")])
    def test_zero_shadow_rejected(self, group, scheme, member):
        scenario, result = _run(group, scheme, faults=[{"kind": "zero_shadow", "actor": member}])
        assert result.verdict.status == "rejected"
        assert _replayed(scenario, result) == result.verdict

    @pytest.mark.parametrize("scheme, field", [
        (scheme, field) for scheme, fields in SIGNATURE_FIELDS.items() for field in fields
    ])
    def test_tampered_signature_rejected(self, group, scheme, field):
        scenario, result = _run(group, scheme, faults=[{"kind": "tamper_field", "field": field}])
        assert result.verdict.status == "rejected", str(result.verdict)
        assert _replayed(scenario, result) == result.verdict

    @pytest.mark.parametrize("scheme", ["ch1-tv", "ch1-tc"])
    @pytest.mark.parametrize("field", ["W_R", "shadows"])
    def test_unreadable_shadow_names_the_member(self, group, scheme, field):
        _, result = _run(group, scheme, faults=[{"kind": "tamper_field", "field": field}])
        assert result.verdict.status == "rejected"
        assert result.verdict.actor in ("R1", "R2", "R3")
        assert not result.transcript.find("partial")

    def test_every_signature_field_is_tamperable(self, group):
        for scheme in SCHEMES:
            _, result = _run(group, scheme)
            payload = result.transcript.find("signature")[0].payload
            assert set(SIGNATURE_FIELDS[scheme]) <= set(payload), scheme

    def test_tamper_unknown_field(self, group):
        data = template_scenario("ch1", group)
        data["faults"] = [{"kind": "tamper_field", "field": "nope"}]
        with pytest.raises(ScenarioInvalid):
            run_scenario(Scenario(data))


def test_replay_of_truncated_transcript(group):
    scenario, result = _run(group, "ch4")
    head = result.transcript.envelopes[:3]
    verdict = replay_verdict(scenario, SessionTranscript(head))
    assert verdict.status == "aborted"
    assert verdict.actor == head[-1].sender


def test_verdict_text():
    assert str(Verdict("accepted")) == "accepted"
    assert str(Verdict("rejected", "motivo")) == "rejected(motivo)"
    assert str(Verdict("aborted", "motivo", "S1")) == "aborted(S1: motivo)"
