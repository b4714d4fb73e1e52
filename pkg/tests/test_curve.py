"""Field and group law checks, exhaustive where the curve is small enough."""

import itertools
import random

import pytest

from conftest import brute_force_points, brute_force_squares

from ringmix import (
    CurveError,
    CurveParams,
    FieldElement,
    ModulusMismatchError,
    NonResidueError,
    OffCurveError,
    Point,
    PointDecodeError,
    Scalar,
    SECP256K1,
    TEST_CURVE_11,
    TEST_CURVE_31,
    ZeroInversionError,
)
from ringmix.curve import chi, sqrt_mod


# ---------------------------------------------------------------------------
# residue arithmetic


def test_inverse_worked_example():
    # 3 * 4 = 12 = 1 mod 11
    assert FieldElement(3, 11).inverse() == FieldElement(4, 11)


def test_addition_reduces():
    assert FieldElement(10, 11) + FieldElement(5, 11) == FieldElement(4, 11)


def test_inverse_exhaustive_f31():
    for x in range(1, 31):
        fe = FieldElement(x, 31)
        assert fe * fe.inverse() == FieldElement(1, 31)


def test_zero_has_no_inverse():
    with pytest.raises(ZeroInversionError):
        FieldElement(0, 11).inverse()


def test_division_and_pow():
    a = FieldElement(7, 31)
    b = FieldElement(3, 31)
    assert (a / b) * b == a
    assert a ** 2 == a * a
    assert a ** 30 == FieldElement(1, 31)  # Fermat


def test_modulus_mismatch_rejected():
    with pytest.raises(ModulusMismatchError):
        FieldElement(1, 11) + FieldElement(1, 31)


def test_field_scalar_mix_rejected():
    with pytest.raises(ModulusMismatchError):
        FieldElement(1, 31) + Scalar(1, 31)
    with pytest.raises(ModulusMismatchError):
        Scalar(2, 21) * FieldElement(2, 21)


def test_residues_are_immutable():
    fe = FieldElement(5, 11)
    with pytest.raises(AttributeError):
        fe.value = 6


# ---------------------------------------------------------------------------
# quadratic character and square roots


def test_chi_zero():
    assert FieldElement(0, 11).chi() == 0


def test_chi_worked_examples():
    # squares mod 11 are {0, 1, 3, 4, 5, 9}
    assert FieldElement(3, 11).chi() == 1
    assert FieldElement(2, 11).chi() == -1


@pytest.mark.parametrize("p", [11, 31])
def test_chi_matches_square_enumeration(p):
    squares = brute_force_squares(p)
    for a in range(p):
        expected = 0 if a == 0 else (1 if a in squares else -1)
        assert FieldElement(a, p).chi() == expected


def test_chi_square_blinding_invariance():
    # chi(r^2 * a) == chi(a) for every nonzero r: the identity that lets the
    # deterministic point encoding drop its random blinding factors.
    for r in range(1, 31):
        for a in range(31):
            assert chi(r * r * a, 31) == chi(a, 31)


def test_sqrt_worked_example():
    # canonical root 4^((11+1)/4) = 4^3 = 64 = 9 mod 11, and 9^2 = 4
    assert FieldElement(4, 11).sqrt() == FieldElement(9, 11)


def test_sqrt_zero():
    assert FieldElement(0, 31).sqrt() == FieldElement(0, 31)


@pytest.mark.parametrize("p", [11, 31])
def test_sqrt_roundtrip_exhaustive(p):
    for x in range(p):
        root = FieldElement(x * x % p, p).sqrt()
        assert root.value in (x, (p - x) % p)
        assert root * root == FieldElement(x * x, p)


def test_sqrt_of_residues_squares_back():
    squares = brute_force_squares(31)
    for a in squares:
        root = FieldElement(a, 31).sqrt()
        assert (root * root).value == a


def test_sqrt_nonresidue_raises():
    assert FieldElement(2, 11).chi() == -1
    with pytest.raises(NonResidueError):
        FieldElement(2, 11).sqrt()


def test_sqrt_requires_3_mod_4():
    with pytest.raises(ValueError):
        sqrt_mod(4, 13)


# ---------------------------------------------------------------------------
# point arithmetic


def test_point_add_worked_example():
    # lambda = (1-2)/(3-2) = -1 = 10; x3 = 100 - 5 = 7; y3 = 10*(2-7) - 2 = 3
    c = TEST_CURVE_11
    assert Point(c, 2, 2) + Point(c, 3, 1) == Point(c, 7, 3)


def test_identity_element():
    c = TEST_CURVE_11
    P = Point(c, 2, 2)
    inf = Point.infinity(c)
    assert P + inf == P
    assert inf + P == P
    assert inf + inf == inf


def test_inverse_pair_sums_to_infinity():
    c = TEST_CURVE_11
    assert (Point(c, 2, 2) + Point(c, 2, 9)).is_infinity


def test_double_two_torsion_point():
    c = TEST_CURVE_11
    assert Point(c, 5, 0).double().is_infinity


def test_double_infinity():
    assert Point.infinity(TEST_CURVE_11).double().is_infinity


def test_double_value_from_group_table():
    # frozen from the exhaustively validated table below
    c = TEST_CURVE_11
    assert Point(c, 2, 2).double() == Point(c, 5, 0)


def test_off_curve_coordinates_rejected():
    with pytest.raises(OffCurveError):
        Point(TEST_CURVE_11, 1, 1)


def test_group_table_axioms_f11():
    """Build the full addition table of the 12-point curve and check every
    group axiom.  The misprinted doubling slope (3x + a instead of 3x^2 + a)
    fails closure on this table, which is why it exists."""
    c = TEST_CURVE_11
    raw = brute_force_points(c)
    assert len(raw) + 1 == 12
    pts = [Point.infinity(c)] + [Point(c, x, y) for x, y in raw]

    table = {}
    for P, Q in itertools.product(pts, repeat=2):
        R = P + Q
        table[(P, Q)] = R
        assert R in pts  # closure (on-curve is already enforced, this pins membership)

    for P, Q in itertools.product(pts, repeat=2):
        assert table[(P, Q)] == table[(Q, P)]  # commutativity
    for P in pts:
        assert table[(P, pts[0])] == P  # identity
        assert any(table[(P, Q)].is_infinity for Q in pts)  # inverses
    for P, Q, R in itertools.product(pts, repeat=3):
        assert (P + Q) + R == P + (Q + R)  # associativity


def test_group_table_axioms_f31():
    c = TEST_CURVE_31
    raw = brute_force_points(c)
    assert len(raw) + 1 == 21
    pts = [Point.infinity(c)] + [Point(c, x, y) for x, y in raw]

    table = {(P, Q): P + Q for P, Q in itertools.product(pts, repeat=2)}
    for P, Q in itertools.product(pts, repeat=2):
        assert table[(P, Q)] in pts
        assert table[(P, Q)] == table[(Q, P)]
    for P in pts:
        assert table[(P, pts[0])] == P
        assert any(table[(P, Q)].is_infinity for Q in pts)
    for P, Q, R in itertools.product(pts, repeat=3):
        assert (P + Q) + R == P + (Q + R)


def test_scalar_mul_matches_repeated_addition():
    c = TEST_CURVE_11
    P = Point(c, 2, 2)
    acc = Point.infinity(c)
    for k in range(0, 14):
        assert k * P == acc
        acc = acc + P
    assert 7 * P == Point(c, 2, 9)  # frozen oracle value


def test_one_times_point():
    P = Point(TEST_CURVE_31, 4, 3)
    assert 1 * P == P


def test_negative_scalar():
    P = Point(TEST_CURVE_31, 4, 3)
    assert -1 * P == -P
    assert (-3 * P) + (3 * P) == Point.infinity(TEST_CURVE_31)


@pytest.mark.parametrize("curve", [TEST_CURVE_11, TEST_CURVE_31, SECP256K1])
def test_generator_order(curve):
    assert (curve.n * curve.g).is_infinity
    assert not ((curve.n - 1) * curve.g).is_infinity


def test_scalar_addition_distributes_exhaustive_f11():
    # (k1 + k2 mod n) * P == k1 * P + k2 * P for every point and pair:
    # scalar arithmetic lives mod n, never mod p.
    c = TEST_CURVE_11
    pts = [Point(c, x, y) for x, y in brute_force_points(c)]
    for P in pts:
        for k1 in range(c.n):
            for k2 in range(c.n):
                left = ((k1 + k2) % c.n) * P
                assert left == (k1 * P) + (k2 * P)


def test_scalar_addition_distributes_sampled_secp():
    rng = random.Random(77)
    c = SECP256K1
    for _ in range(4):
        P = rng.randrange(1, c.n) * c.g
        k1 = rng.randrange(c.n)
        k2 = rng.randrange(c.n)
        assert ((k1 + k2) % c.n) * P == (k1 * P) + (k2 * P)


def test_group_law_sampled_secp():
    rng = random.Random(78)
    c = SECP256K1
    pts = [rng.randrange(1, c.n) * c.g for _ in range(3)]
    A, B, C = pts
    assert A + B == B + A
    assert (A + B) + C == A + (B + C)
    assert A + Point.infinity(c) == A
    assert (A + (-A)).is_infinity


def test_fieldelement_cannot_scale_points():
    with pytest.raises(ModulusMismatchError):
        FieldElement(2, 31) * Point(TEST_CURVE_31, 4, 3)


def test_scalar_wrong_order_rejected():
    with pytest.raises(ModulusMismatchError):
        Scalar(2, 12) * Point(TEST_CURVE_31, 4, 3)


def test_mixed_curve_addition_rejected():
    with pytest.raises(CurveError):
        Point(TEST_CURVE_11, 2, 2) + Point(TEST_CURVE_31, 4, 3)


# ---------------------------------------------------------------------------
# compressed encoding


def test_infinity_encodes_as_single_zero_byte():
    inf = Point.infinity(TEST_CURVE_11)
    assert inf.encode() == b"\x00"
    assert Point.decode(TEST_CURVE_11, b"\x00").is_infinity


def test_codec_roundtrip_every_point_f11():
    c = TEST_CURVE_11
    for x, y in brute_force_points(c):
        P = Point(c, x, y)
        blob = P.encode()
        assert len(blob) == 1 + c.field_bytes
        assert Point.decode(c, blob) == P


def test_decode_rejects_x_off_curve():
    # 8^3 + 7 = 519 = 2 mod 11 and 2 is a non-residue
    with pytest.raises(PointDecodeError):
        Point.decode(TEST_CURVE_11, bytes([0x02, 8]))


def test_decode_rejects_bad_prefix_and_length():
    with pytest.raises(PointDecodeError):
        Point.decode(TEST_CURVE_11, bytes([0x05, 2]))
    with pytest.raises(PointDecodeError):
        Point.decode(TEST_CURVE_11, bytes([0x02, 0, 2]))
    with pytest.raises(PointDecodeError):
        Point.decode(TEST_CURVE_11, b"")


def test_decode_rejects_x_out_of_range():
    with pytest.raises(PointDecodeError):
        Point.decode(TEST_CURVE_11, bytes([0x02, 13]))


def test_y_zero_point_has_no_odd_encoding():
    c = TEST_CURVE_11
    P = Point(c, 5, 0)
    assert Point.decode(c, P.encode()) == P
    with pytest.raises(PointDecodeError):
        Point.decode(c, bytes([0x03, 5]))


def test_codec_roundtrip_sampled_secp():
    rng = random.Random(79)
    c = SECP256K1
    for _ in range(8):
        P = rng.randrange(1, c.n) * c.g
        blob = P.encode()
        assert len(blob) == 33
        assert Point.decode(c, blob) == P


# ---------------------------------------------------------------------------
# parameters


def test_builtin_curves_validate():
    for curve in (SECP256K1, TEST_CURVE_31, TEST_CURVE_11):
        curve.validate()


def test_brute_force_group_orders():
    assert len(brute_force_points(TEST_CURVE_11)) + 1 == TEST_CURVE_11.n == 12
    assert len(brute_force_points(TEST_CURVE_31)) + 1 == TEST_CURVE_31.n == 21


def test_singular_curve_rejected():
    bad = CurveParams(curve_id="bad", p=11, a=0, b=0, gx=0, gy=0, n=11)
    with pytest.raises(CurveError):
        bad.validate()


def test_wrong_generator_order_rejected():
    bad = CurveParams(curve_id="bad-n", p=11, a=0, b=7, gx=4, gy=4, n=7)
    with pytest.raises(CurveError):
        bad.validate()


def test_composite_p_rejected():
    bad = CurveParams(curve_id="bad-p", p=15, a=0, b=7, gx=1, gy=0, n=4)
    with pytest.raises(CurveError):
        bad.validate()
