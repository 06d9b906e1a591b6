import itertools
import random

import pytest

from core.errors import DecryptionMismatch
from core.group import keygen
from core.hashing import HashOracle
from core.sharing import Share, reconstruct_at_zero, unmask_share
from schemes import directed


@pytest.fixture
def parties(group):
    rng = random.Random(11)
    return {name: keygen(group, rng) for name in ("A", "B", "C")}


def _sign(group, parties, oracle, m=b"contrato"):
    return directed.ds_sign(group, parties["A"], parties["B"].y, m, 1234567, 7654321, oracle)


def test_receiver_accepts(group, parties, oracle):
    sig = _sign(group, parties, oracle)
    assert directed.ds_verify(group, sig, parties["B"], parties["A"].y, oracle)


def test_only_designated_receiver_recovers(group, parties, oracle):
    sig = _sign(group, parties, oracle)
    assert directed.ds_recover(group, sig, parties["B"].x) == group.gexp(1234567)
    assert not directed.ds_verify(group, sig, parties["C"], parties["A"].y, oracle)


def test_tampered_message_rejected(group, parties, oracle):
    sig = _sign(group, parties, oracle)
    forged = directed.DirectedSignature(sig.S_A, sig.W_B, sig.V_B, b"contratO")
    assert not directed.ds_verify(group, forged, parties["B"], parties["A"].y, oracle)


def test_tampered_scalar_rejected(group, parties, oracle):
    sig = _sign(group, parties, oracle)
    forged = directed.DirectedSignature(group.add(sig.S_A, 1), sig.W_B, sig.V_B, sig.m)
    assert not directed.ds_verify(group, forged, parties["B"], parties["A"].y, oracle)


def test_redesignation_keeps_R(group, parties, oracle):
    sig = _sign(group, parties, oracle)
    R = directed.ds_recover(group, sig, parties["B"].x)
    moved = directed.ds_redesignate(group, sig, R, parties["C"].y, 99)
    assert moved.S_A == sig.S_A
    assert directed.ds_recover(group, moved, parties["C"].x) == R
    assert directed.ds_verify(group, moved, parties["C"], parties["A"].y, oracle)


def test_fixture_miss_means_rejection(tiny):
    a, b = keygen(tiny, x=4), keygen(tiny, x=7)
    table = HashOracle.from_json(tiny.q, [{"tag": "ch1", "items": ["12", "b64:bQ=="], "out": "a"}])
    sig = directed.ds_sign(tiny, a, b.y, b"m", 9, 5, table)
    assert (sig.S_A, sig.W_B, sig.V_B) == (5, 16, 1)
    assert directed.ds_verify(tiny, sig, b, a.y, table)
    other = directed.DirectedSignature(sig.S_A, sig.W_B, sig.V_B, b"n")
    assert not directed.ds_verify(tiny, other, b, a.y, table)


def test_other_parties_reject_across_small_groups(small_groups):
    rejected = 0
    for trial in range(1000):
        params = small_groups[trial % len(small_groups)]
        rng = random.Random(trial)
        a, b, c = (keygen(params, rng) for _ in range(3))
        table = HashOracle.standard(params.q)
        m = f"pedido {trial}".encode()
        sig = directed.ds_sign(params, a, b.y, m, params.random_scalar(rng), params.random_scalar(rng), table)
        assert directed.ds_verify(params, sig, b, a.y, table)
        rejected += not directed.ds_verify(params, sig, c, a.y, table)
    assert rejected >= 999


def test_validity_proof_confirms_R(group, parties, oracle):
    sig = _sign(group, parties, oracle)
    R, transcript = directed.ds_prove_validity(group, parties["B"], sig, rng=random.Random(5))
    assert transcript.accepted
    assert R == group.gexp(1234567)


class TestThresholdVerification:
    @pytest.fixture
    def members(self, group):
        rng = random.Random(21)
        return {u: keygen(group, rng) for u in (1, 2, 3, 4)}

    def _partials(self, group, members, sig, subset):
        return [
            directed.tv_member_partial(group, members[u], u, sig.shadow_of(u), sig.W_R, subset)
            for u in subset
        ]

    def test_any_k_members_verify(self, group, members, parties, oracle):
        roster = [(u, key.y) for u, key in members.items()]
        sig = directed.tv_sign(group, parties["A"], roster, 3, b"ata", 4242, 2424, oracle, random.Random(1))
        for subset in ([1, 2, 3], [2, 3, 4], [1, 3, 4]):
            partials = self._partials(group, members, sig, subset)
            assert directed.tv_combine_verify(group, partials, sig, parties["A"].y, oracle)

    def test_too_few_partials(self, group, members, parties, oracle):
        roster = [(u, key.y) for u, key in members.items()]
        sig = directed.tv_sign(group, parties["A"], roster, 3, b"ata", 4242, 2424, oracle, random.Random(1))
        partials = self._partials(group, members, sig, [1, 2])
        assert not directed.tv_combine_verify(group, partials, sig, parties["A"].y, oracle)

    def test_fewer_than_k_members_miss_the_nonce(self, group, members, parties, oracle):
        roster = [(u, key.y) for u, key in members.items()]
        sig = directed.tv_sign(group, parties["A"], roster, 3, b"ata", 4242, 2424, oracle, random.Random(1))
        opened = {u: Share(u, unmask_share(sig.shadow_of(u), sig.W_R, key.x, group)) for u, key in members.items()}
        for subset in itertools.combinations(members, 2):
            assert reconstruct_at_zero([opened[u] for u in subset], group.q) != 4242
        for subset in itertools.combinations(members, 3):
            assert reconstruct_at_zero([opened[u] for u in subset], group.q) == 4242

    def test_invalid_threshold(self, group, members, parties, oracle):
        roster = [(u, key.y) for u, key in members.items()]
        with pytest.raises(ValueError):
            directed.tv_sign(group, parties["A"], roster, 5, b"ata", 1, 2, oracle)

    def test_threshold_encryption(self, group, members, parties, oracle):
        roster = [(u, key.y) for u, key in members.items()]
        message = b"mensagem sigilosa de tamanho maior que um bloco de trinta e dois bytes"
        bundle = directed.tc_encrypt(group, parties["A"], roster, 2, message, 555, 666, oracle, random.Random(2))
        assert bundle.c != message
        partials = self._partials(group, members, bundle, [2, 4])
        assert directed.tc_decrypt(group, partials, bundle, parties["A"].y, oracle) == message

    def test_threshold_encryption_detects_tampering(self, group, members, parties, oracle):
        roster = [(u, key.y) for u, key in members.items()]
        bundle = directed.tc_encrypt(group, parties["A"], roster, 2, b"segredo", 555, 666, oracle, random.Random(2))
        partials = self._partials(group, members, bundle, [1, 3])
        flipped = directed.ThresholdCiphertext(bundle.S_A, bundle.W_R, b"\x00" + bundle.c[1:],
                                               bundle.tag, bundle.shadows, bundle.k)
        if flipped.c == bundle.c:
            flipped = directed.ThresholdCiphertext(bundle.S_A, bundle.W_R, b"\x01" + bundle.c[1:],
                                                   bundle.tag, bundle.shadows, bundle.k)
        with pytest.raises(DecryptionMismatch):
            directed.tc_decrypt(group, partials, flipped, parties["A"].y, oracle)
