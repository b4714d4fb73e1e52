"""Finite field and short-Weierstrass curve arithmetic.

Curve parameters are data, not module constants: the exact same code paths
run secp256k1 and the tiny desk-check curves (p = 11 and p = 31) that the
test suite enumerates exhaustively.

Two residue types are deliberately kept apart: ``FieldElement`` reduces
modulo the base-field prime p and ``Scalar`` reduces modulo n, the order of
the group generator.  Point coordinates live mod p, everything used as a
scalar multiplier lives mod n, and mixing the two raises instead of
silently producing garbage.

WARNING: nothing in this module is constant time.  Operation timing depends
on operand values.  Every input hashed, signed, or verified by this package
is public, so that is acceptable here, but do not lift this code into a
context where secret-dependent timing matters.
"""

from __future__ import annotations

import hashlib

try:
    from gmpy2 import mpz, invert as _invert
except ImportError:  # pragma: no cover - gmpy2 is a normal install, ints still work
    mpz = int

    def _invert(a, m):
        return pow(a, -1, m)


class CurveError(Exception):
    """Base class for field and curve arithmetic failures."""


class ModulusMismatchError(CurveError):
    """Arithmetic attempted between residues of different moduli or kinds."""


class ZeroInversionError(CurveError):
    """Multiplicative inverse of zero requested."""


class NonResidueError(CurveError):
    """Square root of a quadratic non-residue requested."""


class OffCurveError(CurveError):
    """Coordinates do not satisfy the curve equation."""


class PointDecodeError(CurveError):
    """Byte string is not a valid point encoding."""


# ---------------------------------------------------------------------------
# Residues


class _Residue:
    """Integer residue with an attached modulus.

    Subclasses are not interchangeable: operations require the exact same
    type and modulus on both sides.
    """

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: int):
        if modulus < 2:
            raise ValueError("modulus must be at least 2")
        object.__setattr__(self, "value", int(value) % modulus)
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def _peer(self, other):
        # None means "not our kind of operand": the operator returns
        # NotImplemented so Python can try the other side (Point.__rmul__).
        if not isinstance(other, _Residue):
            return None
        if type(other) is not type(self):
            raise ModulusMismatchError(
                f"cannot mix {type(self).__name__} with {type(other).__name__}"
            )
        if other.modulus != self.modulus:
            raise ModulusMismatchError(
                f"modulus mismatch: {self.modulus} vs {other.modulus}"
            )
        return other.value

    def __add__(self, other):
        v = self._peer(other)
        if v is None:
            return NotImplemented
        return type(self)(self.value + v, self.modulus)

    def __sub__(self, other):
        v = self._peer(other)
        if v is None:
            return NotImplemented
        return type(self)(self.value - v, self.modulus)

    def __mul__(self, other):
        v = self._peer(other)
        if v is None:
            return NotImplemented
        return type(self)(self.value * v, self.modulus)

    def __neg__(self):
        return type(self)(-self.value, self.modulus)

    def __pow__(self, exponent: int):
        return type(self)(pow(self.value, exponent, self.modulus), self.modulus)

    def inverse(self):
        if self.value == 0:
            raise ZeroInversionError(f"0 has no inverse mod {self.modulus}")
        try:
            return type(self)(int(_invert(self.value, self.modulus)), self.modulus)
        except (ValueError, ZeroDivisionError):
            raise ZeroInversionError(
                f"{self.value} is not invertible mod {self.modulus}"
            ) from None

    def __truediv__(self, other):
        if self._peer(other) is None:
            return NotImplemented
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.modulus
        if type(other) is not type(self):
            return NotImplemented
        return self.modulus == other.modulus and self.value == other.value

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return f"{type(self).__name__}({self.value} mod {self.modulus})"


class Scalar(_Residue):
    """Residue modulo n, the order of the curve generator.

    Exponents and challenge values (the x_i, r_i, c_i, t_i of the signing
    protocol) are Scalars.  Reducing them mod p instead of mod n is the
    classic way to break verification, and the type split makes that a
    loud error rather than a subtle one.
    """

    __slots__ = ()


class FieldElement(_Residue):
    """Residue modulo the base-field prime p (point coordinates live here)."""

    __slots__ = ()

    def chi(self) -> int:
        """Quadratic character: 0 for zero, +1 for a square, -1 otherwise.

        Euler's criterion, a^((p-1)/2) mod p, assuming a prime modulus.
        """
        return chi(self.value, self.modulus)

    def sqrt(self) -> "FieldElement":
        """Canonical square root a^((p+1)/4) mod p, for p = 3 mod 4.

        Returns exactly that power (the other root is its negation).
        Raises NonResidueError when no root exists; callers that cannot
        tolerate the exception should check ``chi() >= 0`` first.
        """
        return FieldElement(sqrt_mod(self.value, self.modulus), self.modulus)


def chi(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(a: int, p: int) -> int:
    """Square root mod p for p = 3 mod 4 (Tonelli-Shanks closed form)."""
    if p % 4 != 3:
        raise ValueError(f"p = 3 mod 4 required, got p = {p}")
    a %= p
    if a == 0:
        return 0
    root = pow(a, (p + 1) // 4, p)
    if root * root % p != a:
        raise NonResidueError(f"{a} is not a square mod {p}")
    return root


# ---------------------------------------------------------------------------
# Curve parameters


def _is_probable_prime(m: int) -> bool:
    # Miller-Rabin over the first 12 primes: deterministic below 3.3e24 and
    # a < 4^-12 error bound beyond, plenty for parameter sanity checks.
    if m < 2:
        return False
    small = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
    for q in small:
        if m % q == 0:
            return m == q
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for base in small:
        x = pow(base, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


class CurveParams:
    """Short-Weierstrass curve y^2 = x^3 + a*x + b over F_p with generator g.

    n is the order of g.  All built-in curves have cofactor 1, so n is also
    the full group order and scalar reduction mod n is valid for every
    point on the curve.
    """

    __slots__ = ("curve_id", "p", "a", "b", "gx", "gy", "n")

    def __init__(self, curve_id: str, p: int, a: int, b: int, gx: int, gy: int, n: int):
        self.curve_id = curve_id
        self.p = p
        self.a = a
        self.b = b
        self.gx = gx
        self.gy = gy
        self.n = n

    @property
    def g(self) -> "Point":
        return Point(self, self.gx, self.gy)

    @property
    def field_bytes(self) -> int:
        return (self.p.bit_length() + 7) // 8

    @property
    def scalar_bytes(self) -> int:
        return (self.n.bit_length() + 7) // 8

    def field(self, value: int) -> FieldElement:
        return FieldElement(value, self.p)

    def scalar(self, value: int) -> Scalar:
        return Scalar(value, self.n)

    def rhs(self, x: int) -> int:
        """x^3 + a*x + b mod p."""
        return (x * x * x + self.a * x + self.b) % self.p

    def validate(self) -> None:
        """Check the published parameters actually describe a usable group."""
        if not _is_probable_prime(self.p):
            raise CurveError(f"{self.curve_id}: p is not prime")
        if (4 * self.a**3 + 27 * self.b**2) % self.p == 0:
            raise CurveError(f"{self.curve_id}: singular curve")
        g = self.g  # construction checks the curve equation
        if self.n < 2:
            raise CurveError(f"{self.curve_id}: generator order too small")
        if not (self.n * g).is_infinity:
            raise CurveError(f"{self.curve_id}: n*g is not the identity")

    def __eq__(self, other):
        if not isinstance(other, CurveParams):
            return NotImplemented
        return (self.p, self.a, self.b, self.gx, self.gy, self.n) == (
            other.p, other.a, other.b, other.gx, other.gy, other.n,
        )

    def __hash__(self):
        return hash((self.p, self.a, self.b, self.gx, self.gy, self.n))

    def __repr__(self):
        return f"CurveParams({self.curve_id!r})"


# ---------------------------------------------------------------------------
# Points

# The group law runs on bare (x, y) tuples (None for infinity) so the hot
# loops stay free of object construction; gmpy2 integers roughly halve the
# cost of 256-bit work when available.


def _pt_add(P, Q, p, a):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * _invert(2 * y1, p) % p
    else:
        lam = (y2 - y1) * _invert(x2 - x1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def _pt_mul(k, P, p, a):
    R = None
    while k:
        if k & 1:
            R = _pt_add(R, P, p, a)
        P = _pt_add(P, P, p, a)
        k >>= 1
    return R


def _pt_mul2(k1, P1, k2, P2, p, a):
    # Straus' trick: one shared doubling chain for k1*P1 + k2*P2.
    P12 = _pt_add(P1, P2, p, a)
    table = (None, P1, P2, P12)
    R = None
    for i in range(max(k1.bit_length(), k2.bit_length()) - 1, -1, -1):
        R = _pt_add(R, R, p, a)
        sel = ((k1 >> i) & 1) | (((k2 >> i) & 1) << 1)
        if sel:
            R = _pt_add(R, table[sel], p, a)
    return R


class Point:
    """Affine curve point, or the point at infinity (the group identity).

    Construction rejects off-curve coordinates, so any Point in circulation
    satisfies the curve equation.
    """

    __slots__ = ("curve", "x", "y")

    def __init__(self, curve: CurveParams, x: int, y: int):
        x %= curve.p
        y %= curve.p
        if (y * y - curve.rhs(x)) % curve.p != 0:
            raise OffCurveError(f"({x}, {y}) not on {curve.curve_id}")
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "x", int(x))
        object.__setattr__(self, "y", int(y))

    def __setattr__(self, name, value):
        raise AttributeError("Point is immutable")

    @classmethod
    def infinity(cls, curve: CurveParams) -> "Point":
        pt = object.__new__(cls)
        object.__setattr__(pt, "curve", curve)
        object.__setattr__(pt, "x", None)
        object.__setattr__(pt, "y", None)
        return pt

    @classmethod
    def _wrap(cls, curve: CurveParams, xy) -> "Point":
        if xy is None:
            return cls.infinity(curve)
        return cls(curve, int(xy[0]), int(xy[1]))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def _xy(self):
        return None if self.x is None else (mpz(self.x), mpz(self.y))

    def _same_curve(self, other: "Point") -> None:
        if not isinstance(other, Point):
            raise TypeError(f"expected Point, got {type(other).__name__}")
        if self.curve != other.curve:
            raise CurveError("points on different curves")

    def __add__(self, other: "Point") -> "Point":
        self._same_curve(other)
        return Point._wrap(
            self.curve, _pt_add(self._xy(), other._xy(), self.curve.p, self.curve.a)
        )

    def __neg__(self) -> "Point":
        if self.is_infinity:
            return self
        return Point(self.curve, self.x, -self.y)

    def __sub__(self, other: "Point") -> "Point":
        return self + (-other)

    def double(self) -> "Point":
        return self + self

    def _scalar_int(self, k) -> int:
        if isinstance(k, Scalar):
            if k.modulus != self.curve.n:
                raise ModulusMismatchError(
                    f"scalar mod {k.modulus} on curve with n = {self.curve.n}"
                )
            return k.value
        if isinstance(k, FieldElement):
            raise ModulusMismatchError("FieldElement cannot multiply a point")
        return int(k)

    def __rmul__(self, k) -> "Point":
        # Literal k*P (no silent mod-n reduction), so n*g really walks the
        # whole ladder and lands on the identity.
        kv = self._scalar_int(k)
        P = self
        if kv < 0:
            kv, P = -kv, -self
        return Point._wrap(
            self.curve, _pt_mul(kv, P._xy(), self.curve.p, self.curve.a)
        )

    def __mul__(self, k) -> "Point":
        return self.__rmul__(k)

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.curve == other.curve and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        if self.is_infinity:
            return f"Point(infinity, {self.curve.curve_id})"
        return f"Point({self.x:#x}, {self.y:#x}, {self.curve.curve_id})"

    # -- compressed encoding ------------------------------------------------

    def encode(self) -> bytes:
        """Compressed form: 0x00 for infinity, else parity prefix plus x.

        The prefix byte is 0x02 for even y and 0x03 for odd, followed by x
        as big-endian, (bit length of p rounded up to bytes) wide.  33 bytes
        on secp256k1.
        """
        if self.is_infinity:
            return b"\x00"
        prefix = 0x02 | (self.y & 1)
        return bytes([prefix]) + self.x.to_bytes(self.curve.field_bytes, "big")

    @classmethod
    def decode(cls, curve: CurveParams, data: bytes) -> "Point":
        if data == b"\x00":
            return cls.infinity(curve)
        if len(data) != 1 + curve.field_bytes:
            raise PointDecodeError(
                f"expected {1 + curve.field_bytes} bytes, got {len(data)}"
            )
        prefix = data[0]
        if prefix not in (0x02, 0x03):
            raise PointDecodeError(f"bad prefix byte {prefix:#x}")
        x = int.from_bytes(data[1:], "big")
        if x >= curve.p:
            raise PointDecodeError("x coordinate out of range")
        rhs = curve.rhs(x)
        if chi(rhs, curve.p) < 0:
            raise PointDecodeError(f"x = {x} is not on {curve.curve_id}")
        y = sqrt_mod(rhs, curve.p)
        want_odd = prefix == 0x03
        if y == 0 and want_odd:
            raise PointDecodeError("y = 0 point has no odd-parity encoding")
        if (y & 1) != want_odd:
            y = curve.p - y
        return cls(curve, x, y)


def dual_scalar_mul(k1, P1: Point, k2, P2: Point) -> Point:
    """k1*P1 + k2*P2 in one pass, the verifier's commitment workhorse."""
    P1._same_curve(P2)
    curve = P1.curve
    k1v = P1._scalar_int(k1) % curve.n
    k2v = P2._scalar_int(k2) % curve.n
    return Point._wrap(
        curve, _pt_mul2(k1v, P1._xy(), k2v, P2._xy(), curve.p, curve.a)
    )


def _batch_invert(vals, p):
    # Montgomery's trick: one field inversion plus 3(m-1) multiplications
    # inverts m nonzero values.
    m = len(vals)
    prefix = [None] * m
    acc = mpz(1)
    for i, v in enumerate(vals):
        prefix[i] = acc
        acc = acc * v % p
    inv = _invert(acc, p)
    out = [None] * m
    for i in range(m - 1, -1, -1):
        out[i] = prefix[i] * inv % p
        inv = inv * vals[i] % p
    return out


def _pt_mul2_batch(jobs, p, a):
    # Lockstep Straus over many independent (k1*P1 + k2*P2) chains.  Every
    # chain doubles on the same schedule, so the slope denominators of a
    # whole step can be inverted together; sign and verify spend most of
    # their time here.  Results match _pt_mul2 exactly.
    m = len(jobs)
    tables = []
    top = 0
    for k1, P1, k2, P2 in jobs:
        tables.append((None, P1, P2, _pt_add(P1, P2, p, a)))
        top = max(top, k1.bit_length(), k2.bit_length())
    R = [None] * m

    for i in range(top - 1, -1, -1):
        # double everything still alive
        dbl = []
        denoms = []
        for idx in range(m):
            pt = R[idx]
            if pt is None:
                continue
            if pt[1] == 0:
                R[idx] = None  # 2-torsion doubles to infinity
                continue
            dbl.append(idx)
            denoms.append(2 * pt[1] % p)
        if denoms:
            for idx, inv in zip(dbl, _batch_invert(denoms, p)):
                x1, y1 = R[idx]
                lam = (3 * x1 * x1 + a) * inv % p
                x3 = (lam * lam - 2 * x1) % p
                R[idx] = (x3, (lam * (x1 - x3) - y1) % p)
        # then fold in this step's table entries
        pend = []
        denoms = []
        for idx, (k1, _, k2, _) in enumerate(jobs):
            sel = ((k1 >> i) & 1) | (((k2 >> i) & 1) << 1)
            if not sel:
                continue
            T = tables[idx][sel]
            if T is None:
                continue
            pt = R[idx]
            if pt is None:
                R[idx] = T
                continue
            x1, y1 = pt
            x2, y2 = T
            if x1 == x2:
                if (y1 + y2) % p == 0:
                    R[idx] = None
                    continue
                num = (3 * x1 * x1 + a) % p  # T == R, tangent slope
                den = 2 * y1 % p
            else:
                num = (y2 - y1) % p
                den = (x2 - x1) % p
            pend.append((idx, T, num))
            denoms.append(den)
        if denoms:
            for (idx, T, num), inv in zip(pend, _batch_invert(denoms, p)):
                x1, y1 = R[idx]
                lam = num * inv % p
                x3 = (lam * lam - x1 - T[0]) % p
                R[idx] = (x3, (lam * (x1 - x3) - y1) % p)
    return R


def dual_scalar_mul_batch(pairs) -> list[Point]:
    """Many (k1, P1, k2, P2) products at once, batching field inversions.

    All pairs must share a curve.  Infinity is allowed for P2 (a plain
    single-base multiplication then falls out of the same code path).
    """
    pairs = list(pairs)
    if not pairs:
        return []
    curve = pairs[0][1].curve
    jobs = []
    for k1, P1, k2, P2 in pairs:
        P1._same_curve(P2)
        if P1.curve != curve:
            raise CurveError("batch mixes curves")
        jobs.append(
            (P1._scalar_int(k1) % curve.n, P1._xy(),
             P2._scalar_int(k2) % curve.n, P2._xy())
        )
    return [
        Point._wrap(curve, xy)
        for xy in _pt_mul2_batch(jobs, mpz(curve.p), curve.a)
    ]


# ---------------------------------------------------------------------------
# Built-in curves

# secp256k1 as published by SEC 2: p = 2^256 - 2^32 - 977, y^2 = x^3 + 7.
SECP256K1 = CurveParams(
    curve_id="secp256k1",
    p=0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F,
    a=0,
    b=7,
    gx=0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798,
    gy=0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8,
    n=0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141,
)

# y^2 = x^3 + 7 over F_31: 21 points, cyclic, and 31 = 7 mod 12 puts it in
# secp256k1's congruence class, so the deterministic hash-to-curve map runs
# unchanged.  p != n here, which is what makes the wrong-modulus regression
# tests bite.
TEST_CURVE_31 = CurveParams(
    curve_id="test-31", p=31, a=0, b=7, gx=1, gy=16, n=21,
)

# y^2 = x^3 + 7 over F_11: 12 points, cyclic, small enough to enumerate the
# whole addition table in tests.
TEST_CURVE_11 = CurveParams(
    curve_id="test-11", p=11, a=0, b=7, gx=4, gy=4, n=12,
)

CURVES = {
    c.curve_id: c for c in (SECP256K1, TEST_CURVE_31, TEST_CURVE_11)
}

for _curve in CURVES.values():
    _curve.validate()
del _curve


def fe_hex(value: FieldElement | Scalar, width: int) -> str:
    """Fixed-width big-endian lowercase hex for a residue."""
    return value.value.to_bytes(width, "big").hex()


def digest(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()
