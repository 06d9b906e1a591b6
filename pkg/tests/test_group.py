import random

import pytest
from hypothesis import given, strategies as st

from core.encoding import canonical_encoding, format_item, from_b64, from_hex, parse_item, to_b64, to_hex
from core.errors import NonInvertible, NotPrime, OrderMismatch, TrivialGenerator, ZeroSecret
from core.group import generate_params, is_probable_prime, keygen, validate_params
from core.hashing import HashOracle
from core.errors import FixtureMiss


class TestValidateParams:
    def test_accepts_small_group(self):
        params = validate_params(23, 11, 3)
        assert (params.p, params.q, params.g) == (23, 11, 3)

    def test_rejects_composite_p(self):
        with pytest.raises(NotPrime):
            validate_params(25, 11, 3)

    def test_rejects_composite_q(self):
        with pytest.raises(NotPrime):
            validate_params(23, 9, 3)

    def test_rejects_q_not_dividing(self):
        with pytest.raises(OrderMismatch):
            validate_params(23, 7, 3)

    def test_rejects_trivial_generator(self):
        with pytest.raises(TrivialGenerator):
            validate_params(23, 11, 1)

    def test_rejects_generator_of_wrong_order(self):
        # 5 gera todo Z_23^*, então 5^11 = −1
        with pytest.raises(OrderMismatch):
            validate_params(23, 11, 5)


def test_primality_small_and_composite():
    assert is_probable_prime(2)
    assert is_probable_prime(2**61 - 1)
    assert not is_probable_prime(1)
    assert not is_probable_prime(561)


def test_generate_params_is_reproducible():
    a = generate_params(16, 64, random.Random(7))
    b = generate_params(16, 64, random.Random(7))
    assert a == b
    assert a.q.bit_length() == 16
    assert a.p.bit_length() == 64
    assert (a.p - 1) % a.q == 0
    assert pow(a.g, a.q, a.p) == 1 and a.g != 1


@pytest.mark.parametrize("q_bits, p_bits", [(4, 64), (32, 32), (32, 16)])
def test_generate_params_rejects_sizes(q_bits, p_bits):
    with pytest.raises(ValueError):
        generate_params(q_bits, p_bits, random.Random(0))


def test_keygen_bounds(tiny):
    assert keygen(tiny, x=4).y == 12
    with pytest.raises(ZeroSecret):
        keygen(tiny, x=0)
    with pytest.raises(ZeroSecret):
        keygen(tiny, x=11)


def test_negative_exponent_is_subgroup_inverse(group):
    y = group.gexp(12345)
    assert group.mul(y, group.exp(y, -1)) == 1


def test_scalar_inverse(tiny):
    assert tiny.smul(tiny.inv(3), 3) == 1
    with pytest.raises(NonInvertible):
        tiny.inv(22)


@given(st.integers(min_value=0, max_value=2**70), st.integers(min_value=0, max_value=2**70))
def test_exponent_addition_matches_product(group, a, b):
    assert group.gexp(a + b) == group.mul(group.gexp(a), group.gexp(b))


class TestEncoding:
    def test_hex_is_lowercase_without_prefix(self):
        assert to_hex(255) == "ff"
        assert from_hex("0xFF") == 255

    def test_hex_rejects_negative(self):
        with pytest.raises(ValueError):
            to_hex(-1)

    def test_canonical_encoding_layout(self):
        encoded = canonical_encoding("ch1", [0x12, b"m"])
        assert encoded == b"ch1" + b"\x00\x00\x00\x01\x12" + b"\x00\x00\x00\x01m"

    def test_zero_is_one_byte(self):
        assert canonical_encoding("t", [0]) == b"t\x00\x00\x00\x01\x00"

    def test_items_keep_their_kind(self):
        assert format_item(b"m") == "b64:bQ=="
        assert parse_item("b64:bQ==") == b"m"
        assert parse_item("1f") == 31

    def test_random_values_survive_file_encoding(self):
        rng = random.Random(7)
        for _ in range(1000):
            value = rng.getrandbits(rng.randrange(1, 256))
            data = bytes(rng.getrandbits(8) for _ in range(rng.randrange(0, 40)))
            assert from_hex(to_hex(value)) == value
            assert from_b64(to_b64(data)) == data
            assert parse_item(format_item(value)) == value
            assert parse_item(format_item(data)) == data


class TestHashOracle:
    def test_standard_is_deterministic_and_reduced(self, group):
        oracle = HashOracle.standard(group.q)
        value = oracle("ch1", [5, b"abc"])
        assert value == oracle("ch1", [5, b"abc"])
        assert 0 <= value < group.q

    def test_changing_one_item_changes_the_output(self, small_groups):
        rng = random.Random(8)
        changed = 0
        for trial in range(1000):
            oracle = HashOracle.standard(small_groups[trial % len(small_groups)].q)
            n, data = rng.getrandbits(64), bytes(rng.getrandbits(8) for _ in range(8))
            before = oracle("ch5", [n, data])
            if trial % 2:
                after = oracle("ch5", [n + 1, data])
            else:
                after = oracle("ch5", [n, bytes([data[0] ^ 1]) + data[1:]])
            changed += before != after
        assert changed >= 990

    def test_tag_separates_domains(self, group):
        oracle = HashOracle.standard(group.q)
        assert oracle("ch1", [5, b"abc"]) != oracle("ch2", [5, b"abc"])

    def test_fixture_lookup_and_miss(self, tiny):
        oracle = HashOracle.from_json(tiny.q, [{"tag": "ch1", "items": ["12", "b64:bQ=="], "out": "a"}])
        assert oracle("ch1", [0x12, b"m"]) == 10
        with pytest.raises(FixtureMiss) as info:
            oracle("ch1", [0x13, b"m"])
        assert info.value.tag == "ch1"
        assert info.value.items == ["13", "b64:bQ=="]
