import random

import pytest

from veribid import groupot, numtheory
from veribid.errors import DomainError, EncodingError, ProtocolError

from helpers import TINY_GROUP, FixedRng


def run_protocol(alpha, messages, params, rng):
    query = groupot.ot_query(alpha, len(messages), params, rng)
    batch = groupot.ot_respond(query.y, messages, params, rng)
    return groupot.ot_recover(batch.pairs[alpha - 1], query.r, params)


def test_group_setup_deterministic_and_valid():
    a = groupot.group_setup(32, seed=1)
    b = groupot.group_setup(32, seed=1)
    assert a == b
    assert a != groupot.group_setup(32, seed=2)
    groupot.validate_group(a)
    assert a.rho.bit_length() == 32


def test_group_setup_production_order_size():
    params = groupot.group_setup(1024, seed=3)
    assert params.rho.bit_length() == 1024
    groupot.validate_group(params)


def test_tiny_group_is_valid():
    groupot.validate_group(TINY_GROUP)


def test_query_with_zero_exponent_is_h():
    query = groupot.ot_query(1, 5, TINY_GROUP, FixedRng(0))
    assert query.y == TINY_GROUP.h


def test_query_matches_direct_arithmetic():
    query = groupot.ot_query(2, 5, TINY_GROUP, FixedRng(3))
    assert query.y == pow(TINY_GROUP.g, 3, 23) * pow(TINY_GROUP.h, 2, 23) % 23


def test_queries_differ_across_runs():
    rng = random.Random(10)
    seen = {groupot.ot_query(2, 5, TINY_GROUP, rng).y for _ in range(8)}
    assert len(seen) > 1


def test_query_rejects_bad_alpha():
    rng = random.Random(11)
    for alpha in (0, 6, -1):
        with pytest.raises(DomainError):
            groupot.ot_query(alpha, 5, TINY_GROUP, rng)


def test_respond_structure(group24):
    rng = random.Random(12)
    query = groupot.ot_query(1, 3, group24, rng)
    batch = groupot.ot_respond(query.y, [10, 20, 30], group24, rng)
    assert len(batch.pairs) == 3
    for a, b in batch.pairs:
        assert 1 <= a < group24.p
        assert 1 <= b < group24.p


def test_respond_with_zero_exponents_exposes_blinding():
    query = groupot.ot_query(1, 2, TINY_GROUP, FixedRng(0))
    batch = groupot.ot_respond(query.y, [7, 9], TINY_GROUP, FixedRng(0))
    # k_i = 0 collapses each pair to (1, m_i)
    assert batch.pairs == ((1, 7), (1, 9))


def test_respond_rejects_bad_messages(group24):
    rng = random.Random(13)
    y = groupot.ot_query(1, 2, group24, rng).y
    with pytest.raises(EncodingError):
        groupot.ot_respond(y, [0, 1], group24, rng)
    with pytest.raises(EncodingError):
        groupot.ot_respond(y, [1, group24.p], group24, rng)
    with pytest.raises(ProtocolError):
        groupot.ot_respond(0, [1, 2], group24, rng)


def test_recover_degenerate_pair():
    assert groupot.ot_recover((1, 15), 5, TINY_GROUP) == 15


def test_recover_known_protocol_run(group24):
    rng = random.Random(14)
    assert run_protocol(4, [2, 4, 6, 8, 10], group24, rng) == 8


def test_full_protocol_every_choice(group24):
    rng = random.Random(15)
    for z in (1, 2, 5, 17):
        messages = [rng.randrange(1, group24.p) for _ in range(z)]
        for alpha in range(1, z + 1):
            assert run_protocol(alpha, messages, group24, rng) == messages[alpha - 1]
    messages = [rng.randrange(1, group24.p) for _ in range(256)]
    for alpha in rng.sample(range(1, 257), 25):
        assert run_protocol(alpha, messages, group24, rng) == messages[alpha - 1]


def test_cross_index_recovery_fails(group24):
    rng = random.Random(16)
    messages = [rng.randrange(1, group24.p) for _ in range(10)]
    mismatches = 0
    for _ in range(100):
        alpha = rng.randrange(1, 11)
        query = groupot.ot_query(alpha, 10, group24, rng)
        batch = groupot.ot_respond(query.y, messages, group24, rng)
        wrong = alpha % 10 + 1
        if groupot.ot_recover(batch.pairs[wrong - 1], query.r, group24) != messages[wrong - 1]:
            mismatches += 1
    assert mismatches == 100


def test_obliviousness_reachable_y_sets_identical():
    """Exhaustive at rho=11: the y values reachable with each choice index are
    the same coset, so y reveals nothing about the index."""
    reachable = []
    for alpha in (1, 2, 3):
        reachable.append(
            {pow(TINY_GROUP.g, r, 23) * pow(TINY_GROUP.h, alpha, 23) % 23 for r in range(11)}
        )
    assert reachable[0] == reachable[1] == reachable[2]
    # and the shift identity: y(alpha2) = y(alpha1) * h^(alpha2-alpha1) for equal r
    for r in range(11):
        y1 = pow(TINY_GROUP.g, r, 23) * pow(TINY_GROUP.h, 1, 23) % 23
        y2 = pow(TINY_GROUP.g, r, 23) * pow(TINY_GROUP.h, 2, 23) % 23
        assert y2 == y1 * TINY_GROUP.h % 23


def test_blinding_exponents_fresh_at_production_order(group512):
    rng = random.Random(17)
    y = groupot.ot_query(1, 256, group512, rng).y
    batch = groupot.ot_respond(y, [1 + i for i in range(256)], group512, rng)
    firsts = [a for a, _ in batch.pairs]
    assert len(set(firsts)) == 256  # distinct g^k_i implies distinct k_i
