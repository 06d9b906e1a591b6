import random

import pytest

from core.errors import OpeningMismatch, ProtocolOrderError
from core.group import keygen
from core.zk import ConfirmationProver, ConfirmationVerifier, Statement, run_confirmation


@pytest.fixture
def statement(group):
    key = keygen(group, random.Random(3))
    mu = group.gexp(777)
    return key, Statement(mu, group.exp(mu, key.x), group.g, key.y)


def test_honest_run_is_accepted(group, statement):
    key, st = statement
    transcript = run_confirmation(group, st, key.x, rng=random.Random(1))
    assert transcript.accepted


def test_fixed_values_reproduce_transcript(tiny):
    # μ = 3, x = 4: Z = y = 12
    st = Statement(3, 12, 3, 12)
    transcript = run_confirmation(tiny, st, 4, u=2, v=5, alpha=7)
    assert transcript.w == tiny.mul(tiny.exp(3, 2), tiny.exp(3, 5))
    assert transcript.beta == tiny.mul(transcript.w, tiny.gexp(7))
    assert transcript.gamma == tiny.exp(transcript.beta, 4)
    assert (transcript.u, transcript.v, transcript.alpha) == (2, 5, 7)
    assert transcript.accepted


def test_false_statement_is_rejected(group, statement):
    key, st = statement
    wrong = Statement(st.mu, group.mul(st.Z, group.g), st.g, st.y)
    assert not run_confirmation(group, wrong, key.x, rng=random.Random(1)).accepted


def test_wrong_witness_is_rejected(group, statement):
    key, st = statement
    assert not run_confirmation(group, st, key.x + 1, rng=random.Random(1)).accepted


def test_prover_aborts_on_bad_opening(group, statement):
    key, st = statement
    verifier = ConfirmationVerifier(group, st, u=10, v=20)
    prover = ConfirmationProver(group, st, key.x)
    prover.respond(verifier.commit(), alpha=5)
    with pytest.raises(OpeningMismatch):
        prover.check_opening(11, 20)


def test_out_of_order_messages(group, statement):
    key, st = statement
    verifier = ConfirmationVerifier(group, st, rng=random.Random(2))
    with pytest.raises(ProtocolOrderError):
        verifier.reveal()
    verifier.commit()
    with pytest.raises(ProtocolOrderError):
        verifier.commit()

    prover = ConfirmationProver(group, st, key.x)
    with pytest.raises(ProtocolOrderError):
        prover.final()


def test_statement_outside_group_range(tiny):
    with pytest.raises(ValueError):
        ConfirmationVerifier(tiny, Statement(3, 0, 3, 12))


def test_wrong_witness_caught_unless_beta_is_one(tiny):
    # μ = g^2, x = 4; com x' ≠ x o provador só passa quando β = 1
    x = 4
    mu = tiny.gexp(2)
    st = Statement(mu, tiny.exp(mu, x), tiny.g, tiny.gexp(x))
    for x_wrong in range(1, 11):
        if x_wrong == x:
            continue
        for u in range(1, 11):
            for v in range(11):
                transcript = run_confirmation(tiny, st, x_wrong, u=u, v=v, alpha=3)
                assert transcript.accepted == (transcript.beta == 1)


def test_completeness_across_small_groups(small_groups):
    accepted = 0
    for trial in range(1000):
        params = small_groups[trial % len(small_groups)]
        rng = random.Random(trial)
        x = params.random_scalar(rng)
        mu = params.gexp(params.random_scalar(rng))
        st = Statement(mu, params.exp(mu, x), params.g, params.gexp(x))
        accepted += run_confirmation(params, st, x, rng=rng).accepted
    assert accepted == 1000
