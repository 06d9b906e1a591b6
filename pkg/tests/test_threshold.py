import itertools
import random

import pytest

from core.errors import PartialRejected
from core.group import keygen
from core.sharing import Share
from schemes import envelope, threshold


@pytest.fixture
def receiver(group):
    return keygen(group, random.Random(41))


class TestDirectedThreshold:
    def _sign(self, group, receiver, oracle, subset, corrupt=None):
        setup = threshold.ch3_setup(group, [1, 2, 3, 4, 5], 3, random.Random(1))
        nonces = {u: (1000 + u, 2000 + u) for u in subset}
        commits = [threshold.ch3_partial_commit(group, receiver.y, *nonces[u]) for u in subset]
        W, Z, R = threshold.ch3_aggregate(group, commits, b"laudo", oracle)
        partials = []
        for u in subset:
            _, s_i = threshold.ch3_partial_sign(group, setup.shares[u], subset, nonces[u][0], R)
            partials.append(group.add(s_i, 1) if u == corrupt else s_i)
        sig = threshold.Ch3Signature(threshold.ch3_combine(group, partials), W, R, b"laudo")
        return setup, sig

    def test_any_t_members_sign(self, group, receiver, oracle):
        for subset in ([1, 2, 3], [2, 4, 5]):
            setup, sig = self._sign(group, receiver, oracle, subset)
            assert threshold.ch3_verify(group, sig, receiver, setup.y_G, oracle)

    def test_corrupt_partial_rejected(self, group, receiver, oracle):
        setup, sig = self._sign(group, receiver, oracle, [1, 2, 3], corrupt=2)
        assert not threshold.ch3_verify(group, sig, receiver, setup.y_G, oracle)

    def test_validity_proof(self, group, receiver, oracle):
        setup, sig = self._sign(group, receiver, oracle, [1, 3, 5])
        transcript = threshold.ch3_prove_validity(group, receiver, sig, setup.y_G, rng=random.Random(4))
        assert transcript.accepted

    def test_fixed_polynomial(self, tiny):
        setup = threshold.ch3_setup(tiny, [1, 2, 3], 2, coeffs=[6, 4])
        assert setup.y_G == tiny.gexp(6)
        assert setup.shares[2] == Share(2, (6 + 4 * 2) % 11)

    def test_invalid_threshold(self, tiny):
        with pytest.raises(ValueError):
            threshold.ch3_setup(tiny, [1, 2], 3)


class TestMaskedThreshold:
    @pytest.fixture
    def layout(self, group):
        rng = random.Random(51)
        signers = {u: keygen(group, rng) for u in (1, 2, 3, 4)}
        verifiers = {u: keygen(group, rng) for u in (1, 2, 3)}
        setup = threshold.ch4_setup(
            group,
            [(u, k.y) for u, k in signers.items()], 3,
            [(u, k.y) for u, k in verifiers.items()], 2,
            rng=rng,
        )
        return signers, verifiers, setup

    def _shadows(self, group, verifiers, setup, subset):
        return [
            threshold.ch4_member_shadow(group, verifiers[u], u, setup.verifying.masked[u], setup.verifying.W, subset)
            for u in subset
        ]

    def test_group_signs_group_verifies(self, group, layout, oracle):
        signers, verifiers, setup = layout
        nonces = {u: (300 + u, 400 + u) for u in signers}
        sig = threshold.ch4_sign(group, setup.signing, signers, [1, 2, 4],
                                 setup.verifying.public_key, b"acordo", nonces, oracle)
        for subset in ([1, 2], [2, 3]):
            shadows = self._shadows(group, verifiers, setup, subset)
            assert sum(shadows) % group.q == setup.verifying.poly.secret
            assert threshold.ch4_verify(group, sig, shadows, 2, setup.signing.public_key, oracle)

    def test_zeroed_shadow_rejected(self, group, layout, oracle):
        signers, verifiers, setup = layout
        nonces = {u: (300 + u, 400 + u) for u in signers}
        sig = threshold.ch4_sign(group, setup.signing, signers, [1, 2, 3],
                                 setup.verifying.public_key, b"acordo", nonces, oracle)
        shadows = self._shadows(group, verifiers, setup, [1, 3])
        shadows[0] = 0
        assert not threshold.ch4_verify(group, sig, shadows, 2, setup.signing.public_key, oracle)

    def test_every_signing_and_verifying_subset(self, group, oracle):
        # 4 de 7 assinam, 5 de 6 verificam: todas as 35·6 combinações
        rng = random.Random(52)
        signers = {u: keygen(group, rng) for u in range(1, 8)}
        verifiers = {u: keygen(group, rng) for u in range(1, 7)}
        setup = threshold.ch4_setup(
            group,
            [(u, k.y) for u, k in signers.items()], 4,
            [(u, k.y) for u, k in verifiers.items()], 5,
            rng=rng,
        )
        nonces = {u: (500 + u, 600 + u) for u in signers}
        verifying = [self._shadows(group, verifiers, setup, list(subset))
                     for subset in itertools.combinations(verifiers, 5)]
        checked = 0
        for subset_S in itertools.combinations(signers, 4):
            sig = threshold.ch4_sign(group, setup.signing, signers, list(subset_S),
                                     setup.verifying.public_key, b"acordo", nonces, oracle)
            for shadows in verifying:
                assert threshold.ch4_verify(group, sig, shadows, 5, setup.signing.public_key, oracle), subset_S
                checked += 1
        assert checked == 35 * 6

    def test_wrong_number_of_signers(self, group, layout, oracle):
        signers, _, setup = layout
        nonces = {u: (1, 2) for u in signers}
        with pytest.raises(ValueError):
            threshold.ch4_sign(group, setup.signing, signers, [1, 2],
                               setup.verifying.public_key, b"acordo", nonces, oracle)


class TestEnvelope:
    def test_commit_aggregate_recover(self, group, receiver):
        commits = [envelope.ms_commit(group, receiver.y, 10 + i, 20 + i) for i in range(3)]
        U, V, W = envelope.aggregate(group, commits)
        sig = envelope.ms_envelope(0, U, W, b"x")
        assert envelope.receiver_recover(group, sig, receiver.x) == V

    def test_combine_identifies_bad_partial(self, group):
        with pytest.raises(PartialRejected) as info:
            envelope.ms_combine(group, {"S1": 5, "S2": 6}, checker=lambda signer, s: signer != "S2")
        assert info.value.signer == "S2"
        assert envelope.ms_combine(group, {"S1": 5, "S2": 6}) == 11

    def test_envelope_proof(self, group, receiver):
        commits = [envelope.ms_commit(group, receiver.y, 7, 8)]
        U, _, W = envelope.aggregate(group, commits)
        sig = envelope.ms_envelope(1, U, W, b"x")
        assert envelope.ms_prove_validity(group, receiver, sig, rng=random.Random(3)).accepted
