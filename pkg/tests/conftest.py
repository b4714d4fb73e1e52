import random

import pytest

from ringmix import (
    HashVariant,
    SECP256K1,
    TEST_CURVE_11,
    TEST_CURVE_31,
    ring_gen,
    setup,
)


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture(scope="session")
def pp31():
    return setup(8, TEST_CURVE_31, HashVariant.FT_DETERMINISTIC)


@pytest.fixture(scope="session")
def pp31_tryinc():
    return setup(8, TEST_CURVE_31, HashVariant.TRY_INCREMENT)


@pytest.fixture(scope="session")
def pp_secp():
    return setup(128, SECP256K1, HashVariant.FT_DETERMINISTIC)


@pytest.fixture(scope="session")
def pp31_insecure():
    return setup(
        8, TEST_CURVE_31, HashVariant.INSECURE_MULT_G, insecure_override=True
    )


def distinct_keys(pp, rng, count):
    """Key pairs with no repeated public key (tiny curves collide often)."""
    keys, seen = [], set()
    while len(keys) < count:
        pair = ring_gen(pp, rng)
        if pair.pk not in seen:
            seen.add(pair.pk)
            keys.append(pair)
    return keys


def brute_force_points(curve):
    """Every affine point by scanning the full (x, y) grid; the infinity
    point is appended.  Independent of the package's point logic."""
    pts = []
    for x in range(curve.p):
        for y in range(curve.p):
            if (y * y - (x ** 3 + curve.a * x + curve.b)) % curve.p == 0:
                pts.append((x, y))
    return pts


def brute_force_squares(p):
    """The set of quadratic residues mod p, including 0, by enumeration."""
    return {x * x % p for x in range(p)}
