"""Hashing byte strings to curve points (and to scalars).

Three point constructions live here:

* ``try_and_increment``: rejection sampling over x candidates.  Simple and
  works on any curve, but the iteration count depends on the input, so the
  running time leaks which candidates failed.  All inputs here are public,
  which is the only reason that is tolerable.
* ``hash_to_curve_ft``: the Fouque-Tibouchi encoding composed with a
  hash-to-field.  Fully deterministic with a fixed operation count, defined
  for a = 0 curves whose prime is 7 mod 12 (secp256k1 qualifies).
* ``insecure_hash_mult_g``: multiplies the generator by a public hash.  The
  discrete log of the output is public, which guts the privacy of any tag
  built from it.  Kept only so the attack demos can show exactly how it
  fails; signing refuses it unless explicitly overridden.

Two one-byte domain tags keep the to-field oracle and the to-scalar oracle
independent even on identical message bytes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
import hashlib

from .curve import (
    CurveParams,
    FieldElement,
    Point,
    Scalar,
    chi,
    sqrt_mod,
)


class HashToCurveError(Exception):
    """No curve point could be produced for the input."""


class UnsupportedCurveError(Exception):
    """Curve does not meet the preconditions of the requested map."""


class HashVariant(enum.Enum):
    """Which construction produces the protocol's point-valued hash."""

    TRY_INCREMENT = "try-inc"
    FT_DETERMINISTIC = "ft"
    INSECURE_MULT_G = "insecure-mult-g"


# Domain separation: 0x01 prefixes the to-field oracle, 0x02 the to-scalar
# oracle.  Same message bytes, independent outputs.
_TO_FIELD = b"\x01"
_TO_SCALAR = b"\x02"

# Default candidate budget for try-and-increment; the chance of exhausting
# it on a near-half-density curve is about 2^-k.
TRY_INCREMENT_LIMIT = 256


def _digest_int(domain: bytes, counter: int, msg: bytes) -> int:
    h = hashlib.sha256(domain + bytes([counter]) + msg).digest()
    return int.from_bytes(h, "big")


def hash_to_field(msg: bytes, counter: int, curve: CurveParams) -> FieldElement:
    """SHA-256 of (domain tag, counter byte, msg), reduced mod p."""
    return curve.field(_digest_int(_TO_FIELD, counter, msg))


def hash_to_scalar(msg: bytes, curve: CurveParams) -> Scalar:
    """SHA-256 of (domain tag, msg), reduced mod n.

    The reduction bias is below 2^-128 on secp256k1 because n is within
    2^129 of 2^256.
    """
    return curve.scalar(_digest_int(_TO_SCALAR, 0, msg))


# ---------------------------------------------------------------------------
# Try and increment


def try_and_increment_field(u: FieldElement, curve: CurveParams,
                            limit: int = TRY_INCREMENT_LIMIT) -> Point:
    """First x in u, u+1, ... whose cubic is a square, paired with its root."""
    x = u.value
    p = curve.p
    for _ in range(limit):
        rhs = curve.rhs(x)
        if chi(rhs, p) >= 0:
            return Point(curve, x, sqrt_mod(rhs, p))
        x = (x + 1) % p
    raise HashToCurveError(f"no curve point within {limit} increments")


def try_and_increment(msg: bytes, curve: CurveParams,
                      limit: int = TRY_INCREMENT_LIMIT) -> Point:
    return try_and_increment_field(hash_to_field(msg, 0, curve), curve, limit)


# ---------------------------------------------------------------------------
# Fouque-Tibouchi map


@dataclass(frozen=True)
class FtConstants:
    """Per-curve constants for the Fouque-Tibouchi encoding.

    sqrt_m3 is the canonical square root of -3 mod p and c1 equals
    (-1 + sqrt(-3)) / 2.  Both exist exactly when p = 1 mod 3 with
    p = 3 mod 4, i.e. p = 7 mod 12.
    """

    sqrt_m3: int
    c1: int

    @staticmethod
    @lru_cache(maxsize=None)
    def for_curve(curve: CurveParams) -> "FtConstants":
        if curve.a != 0:
            raise UnsupportedCurveError("map requires a curve of form y^2 = x^3 + b")
        if curve.p % 12 != 7:
            raise UnsupportedCurveError(
                f"map requires p = 7 mod 12, got p = {curve.p % 12} mod 12"
            )
        sqrt_m3 = sqrt_mod(-3 % curve.p, curve.p)
        c1 = (sqrt_m3 - 1) * pow(2, -1, curve.p) % curve.p
        return FtConstants(sqrt_m3=sqrt_m3, c1=c1)


@lru_cache(maxsize=None)
def ft_fallback_point(curve: CurveParams) -> Point:
    """Fixed image for the map's two degenerate inputs.

    Smallest x >= 1 whose cubic is a square, with the canonical root.  The
    degenerate inputs (t = 0, and t with 1 + b + t^2 = 0) have no defined
    w, so they are pinned here; the distribution bias is two inputs out
    of p.
    """
    x = 1
    while True:
        rhs = curve.rhs(x)
        if chi(rhs, curve.p) >= 0:
            return Point(curve, x, sqrt_mod(rhs, curve.p))
        x += 1


def ft_map(t: FieldElement, curve: CurveParams) -> Point:
    """Deterministic Fouque-Tibouchi encoding of a field element.

    The published algorithm draws three random blinding factors r_i and
    evaluates the quadratic character of r_i^2 * v; since chi(r^2 v) always
    equals chi(v), the blinding only masks timing and is dropped here so
    the map is a pure function (the character tests below use v directly).
    The w line multiplies by sqrt(-3), and the returned y is the root of
    the selected x_i's cubic; the exhaustive on-curve test over F_31 pins
    both choices.
    """
    consts = FtConstants.for_curve(curve)
    p, b = curve.p, curve.b
    tv = t.value
    denom = (1 + b + tv * tv) % p
    if tv == 0 or denom == 0:
        return ft_fallback_point(curve)
    w = consts.sqrt_m3 * tv % p * pow(denom, -1, p) % p
    x1 = (consts.c1 - tv * w) % p
    x2 = (-1 - x1) % p
    x3 = (1 + pow(w * w % p, -1, p)) % p
    alpha = chi(curve.rhs(x1), p)
    beta = chi(curve.rhs(x2), p)
    # alpha, beta never vanish on an odd-order curve (no y = 0 points), and
    # when both are -1 the third cubic is forced to be a square.
    i = ((alpha - 1) * beta) % 3 + 1
    x = (x1, x2, x3)[i - 1]
    y = chi(tv, p) * sqrt_mod(curve.rhs(x), p) % p
    return Point(curve, x, y)


def hash_to_curve_ft(msg: bytes, curve: CurveParams) -> Point:
    return ft_map(hash_to_field(msg, 0, curve), curve)


# ---------------------------------------------------------------------------
# The broken variant


def insecure_hash_exponent(msg: bytes, curve: CurveParams) -> Scalar:
    """The publicly recomputable discrete log behind insecure_hash_mult_g.

    Anyone can evaluate this, which is precisely the flaw: a tag built as
    sk * (e * g) equals e * pk, a product of public values.
    """
    return curve.scalar(_digest_int(_TO_FIELD, 0, msg))


def insecure_hash_mult_g(msg: bytes, curve: CurveParams) -> Point:
    """Generator times a public hash.  Do not use for anything but demos."""
    return insecure_hash_exponent(msg, curve) * curve.g


# ---------------------------------------------------------------------------
# Dispatch


def hash_to_curve(msg: bytes, curve: CurveParams, variant: HashVariant,
                  limit: int = TRY_INCREMENT_LIMIT) -> Point:
    if variant is HashVariant.TRY_INCREMENT:
        return try_and_increment(msg, curve, limit)
    if variant is HashVariant.FT_DETERMINISTIC:
        return hash_to_curve_ft(msg, curve)
    if variant is HashVariant.INSECURE_MULT_G:
        return insecure_hash_mult_g(msg, curve)
    raise ValueError(f"unknown hash variant {variant!r}")
