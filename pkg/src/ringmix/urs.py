"""Unique ring signatures built from an OR-composition of equal-discrete-log
proofs, made non-interactive with the Fiat-Shamir transform.

A signature on message m under ring R = (y_1, ..., y_n) carries a tag
tau = x_i * H(m || R), where x_i is the signer's secret key and H hashes to
a curve point.  The tag is deterministic in (secret key, message, ring), so
two signatures by the same member over the same context expose the same tag
(that is the linkability feature), while the per-member challenge/response
pairs (c_j, t_j) stay randomized.

Every exponent-like quantity (x_i, r_i, c_j, t_j and all sums of them) is a
``Scalar``, reduced modulo n, the generator order.  Reducing any of them
modulo the base-field prime instead silently breaks verification whenever
p != n; the Scalar type and the regression tests both guard that edge.

Wire format (``encode_signature``): tau.x || tau.y, each base-field width,
followed by c_1 || t_1 || ... || c_n || t_n, each scalar width, everything
big-endian.  On secp256k1 both widths are 32, so a size-n ring signature is
exactly 64*(n+1) bytes.  Message and ring travel out of band.

Challenge transcript (H'): SHA-256 over the to-scalar domain tag, then a
context label (``urs-ring`` or ``urs-dleq``), then for ring signatures the
8-byte big-endian message length, the message, the ring's canonical bytes,
and the commitment pairs a_1, b_1, ..., a_n, b_n in transcript encoding
(compressed points, with infinity padded to the same width), reduced mod n.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator

from .curve import (
    CurveParams,
    Point,
    Scalar,
    digest,
    dual_scalar_mul,
    dual_scalar_mul_batch,
)
from .hashing import FtConstants, HashVariant, hash_to_curve, hash_to_scalar


class UrsError(Exception):
    """Base class for signing-protocol failures."""


class InsecureVariantError(UrsError):
    """Insecure point hash requested without the explicit override."""


class RingError(UrsError):
    """Public key list cannot form a valid ring."""


class SignerNotInRingError(UrsError):
    """Signing key's public key is absent from the ring."""


class SignatureFormatError(UrsError):
    """Byte string is not a well-formed signature encoding."""


class RingSizeMismatchError(SignatureFormatError):
    """Encoded signature is for a ring of a different size."""


# ---------------------------------------------------------------------------
# Parameters and keys


@dataclass(frozen=True)
class PublicParams:
    """Everything verifiers share: curve, point-hash choice, scalar hash."""

    security_bits: int
    curve: CurveParams
    h_variant: HashVariant
    hprime_id: str = "sha256"
    insecure_override: bool = False


def setup(security_bits: int, curve: CurveParams, h_variant: HashVariant,
          *, insecure_override: bool = False) -> PublicParams:
    """Validate the curve and fix the hash choices.

    The generator-multiple hash variant is refused unless the caller
    explicitly overrides; it exists only for the attack demonstrations.
    """
    curve.validate()
    if h_variant is HashVariant.INSECURE_MULT_G and not insecure_override:
        raise InsecureVariantError(
            "insecure generator-multiple hash requires insecure_override=True"
        )
    if h_variant is HashVariant.FT_DETERMINISTIC:
        FtConstants.for_curve(curve)  # fails fast on unsupported curves
    return PublicParams(
        security_bits=security_bits,
        curve=curve,
        h_variant=h_variant,
        insecure_override=insecure_override,
    )


@dataclass(frozen=True)
class KeyPair:
    sk: Scalar
    pk: Point


def ring_gen(pp: PublicParams, rng) -> KeyPair:
    """Fresh key pair: sk uniform in [1, n), pk = sk * g.

    ``rng`` is anything with ``randrange`` (``random.Random`` for seeded
    test runs, ``random.SystemRandom`` for real keys).
    """
    sk = pp.curve.scalar(rng.randrange(1, pp.curve.n))
    return KeyPair(sk=sk, pk=sk * pp.curve.g)


# ---------------------------------------------------------------------------
# Rings


class Ring:
    """Canonicalized ring: members sorted by compressed encoding, no dups.

    Any input ordering of the same keys yields the same Ring, the same
    canonical bytes, and therefore the same signatures and tags.
    """

    __slots__ = ("members", "canonical_bytes", "_positions")

    def __init__(self, pks: Iterable[Point]):
        pks = list(pks)
        if len(pks) < 2:
            raise RingError("ring needs at least 2 members")
        curve = pks[0].curve
        encoded = []
        for pk in pks:
            if not isinstance(pk, Point):
                raise RingError(f"ring member is not a Point: {pk!r}")
            if pk.curve != curve:
                raise RingError("ring members on different curves")
            if pk.is_infinity:
                raise RingError("identity point cannot be a ring member")
            encoded.append(pk.encode())
        if len(set(encoded)) != len(encoded):
            raise RingError("duplicate ring member")
        order = sorted(range(len(pks)), key=lambda i: encoded[i])
        members = tuple(pks[i] for i in order)
        object.__setattr__(self, "members", members)
        object.__setattr__(
            self, "canonical_bytes", b"".join(encoded[i] for i in order)
        )
        object.__setattr__(
            self, "_positions", {pk: idx for idx, pk in enumerate(members)}
        )

    def __setattr__(self, name, value):
        raise AttributeError("Ring is immutable")

    @property
    def curve(self) -> CurveParams:
        return self.members[0].curve

    @property
    def digest(self) -> bytes:
        return digest(self.canonical_bytes)

    def index_of(self, pk: Point) -> int:
        try:
            return self._positions[pk]
        except KeyError:
            raise SignerNotInRingError("public key not in ring") from None

    def __contains__(self, pk: Point) -> bool:
        return pk in self._positions

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.members)

    def __getitem__(self, idx: int) -> Point:
        return self.members[idx]

    def __eq__(self, other):
        if not isinstance(other, Ring):
            return NotImplemented
        return self.canonical_bytes == other.canonical_bytes

    def __hash__(self):
        return hash(self.canonical_bytes)

    def __repr__(self):
        return f"Ring({len(self.members)} members, {self.curve.curve_id})"


def canonical_ring(pks: Iterable[Point]) -> Ring:
    return Ring(pks)


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class Tag:
    """The linkability handle tau = sk * H(m || R); on curve, never infinity."""

    point: Point

    def __post_init__(self):
        if self.point.is_infinity:
            raise UrsError("tag cannot be the identity point")


@dataclass(frozen=True)
class Signature:
    tau: Tag
    cs: tuple[Scalar, ...]
    ts: tuple[Scalar, ...]
    ring_hash: bytes
    msg_hash: bytes

    @property
    def ring_size(self) -> int:
        return len(self.cs)


class LinkResult(enum.Enum):
    LINKED = "linked"
    UNLINKED = "unlinked"
    INCOMPARABLE = "incomparable"


def ring_message_bytes(msg: bytes, ring: Ring) -> bytes:
    """The H(m || R) preimage: length-prefixed message, canonical ring."""
    return len(msg).to_bytes(8, "big") + msg + ring.canonical_bytes


def ring_message_point(pp: PublicParams, msg: bytes, ring: Ring) -> Point:
    """H(m || R), the per-context base point the tag is built on."""
    return hash_to_curve(ring_message_bytes(msg, ring), pp.curve, pp.h_variant)


def _transcript_enc(point: Point) -> bytes:
    # Fixed-width transcript form: infinity pads to the compressed length so
    # commitment boundaries cannot shift.
    if point.is_infinity:
        return b"\x00" * (1 + point.curve.field_bytes)
    return point.encode()


def _ring_challenge(curve: CurveParams, msg: bytes, ring: Ring,
                    a_pts: list[Point], b_pts: list[Point]) -> Scalar:
    parts = [b"urs-ring", len(msg).to_bytes(8, "big"), msg, ring.canonical_bytes]
    for a, b in zip(a_pts, b_pts):
        parts.append(_transcript_enc(a))
        parts.append(_transcript_enc(b))
    return hash_to_scalar(b"".join(parts), curve)


def ring_sign(pp: PublicParams, sk: Scalar, ring: Ring, msg: bytes, rng) -> Signature:
    """Sign msg as the ring member holding sk.

    For every other member j the pair (c_j, t_j) is drawn at random and the
    commitments a_j = t_j*g + c_j*y_j, b_j = t_j*h + c_j*tau are simulated;
    for the signer the commitments are honest Schnorr-style a_i = r*g,
    b_i = r*h.  The challenge hash then pins the signer's c_i to the value
    that closes the ring, and t_i = r - c_i*sk completes the proof.
    """
    curve = pp.curve
    if sk.modulus != curve.n:
        raise UrsError("secret key scalar does not match the curve order")
    g = curve.g
    i = ring.index_of(sk * g)
    h = ring_message_point(pp, msg, ring)
    tau_point = sk * h
    if tau_point.is_infinity:
        # Only reachable when n is composite (tiny test curves): the hash
        # point's order divides sk.  Impossible on secp256k1, where n is
        # prime and sk is in [1, n).
        raise UrsError("degenerate tag: hash point order divides the secret key")

    size = len(ring)
    cs: list[Scalar | None] = [None] * size
    ts: list[Scalar | None] = [None] * size
    a_pts: list[Point | None] = [None] * size
    b_pts: list[Point | None] = [None] * size

    jobs = []
    simulated = []
    for j, y_j in enumerate(ring):
        if j == i:
            continue
        t_j = curve.scalar(rng.randrange(curve.n))
        c_j = curve.scalar(rng.randrange(curve.n))
        cs[j], ts[j] = c_j, t_j
        jobs.append((t_j, g, c_j, y_j))
        jobs.append((t_j, h, c_j, tau_point))
        simulated.append(j)
    r = curve.scalar(rng.randrange(curve.n))
    zero = curve.scalar(0)
    jobs.append((r, g, zero, g))
    jobs.append((r, h, zero, h))

    results = dual_scalar_mul_batch(jobs)
    for pos, j in enumerate(simulated):
        a_pts[j] = results[2 * pos]
        b_pts[j] = results[2 * pos + 1]
    a_pts[i] = results[-2]
    b_pts[i] = results[-1]

    c_i = _ring_challenge(curve, msg, ring, a_pts, b_pts)
    for j in range(size):
        if j != i:
            c_i = c_i - cs[j]
    cs[i] = c_i
    ts[i] = r - c_i * sk

    return Signature(
        tau=Tag(tau_point),
        cs=tuple(cs),
        ts=tuple(ts),
        ring_hash=ring.digest,
        msg_hash=digest(msg),
    )


def ring_verify(pp: PublicParams, ring: Ring, msg: bytes, sig: Signature) -> bool:
    """Accept iff sum(c_j) equals the challenge over rebuilt commitments.

    Also requires the signature's ring and message digests to match the
    presented context.  Malformed structures reject rather than raise.
    """
    curve = pp.curve
    size = len(ring)
    if len(sig.cs) != size or len(sig.ts) != size:
        return False
    for s in (*sig.cs, *sig.ts):
        if not isinstance(s, Scalar) or s.modulus != curve.n:
            return False
    tau = sig.tau.point
    if tau.curve != curve or tau.is_infinity:
        return False
    if sig.ring_hash != ring.digest or sig.msg_hash != digest(msg):
        return False

    g = curve.g
    h = ring_message_point(pp, msg, ring)
    jobs = []
    for c_j, t_j, y_j in zip(sig.cs, sig.ts, ring):
        jobs.append((t_j, g, c_j, y_j))
        jobs.append((t_j, h, c_j, tau))
    results = dual_scalar_mul_batch(jobs)
    a_pts = results[0::2]
    b_pts = results[1::2]

    total = curve.scalar(0)
    for c_j in sig.cs:
        total = total + c_j
    return total == _ring_challenge(curve, msg, ring, a_pts, b_pts)


def tag_of(sig: Signature) -> Tag:
    return sig.tau


def link(s1: Signature, s2: Signature) -> LinkResult:
    """Compare two individually verified signatures.

    Tags are only meaningful within one (message, ring) context; across
    contexts the verdict is INCOMPARABLE regardless of the signers.
    """
    if s1.msg_hash != s2.msg_hash or s1.ring_hash != s2.ring_hash:
        return LinkResult.INCOMPARABLE
    if s1.tau == s2.tau:
        return LinkResult.LINKED
    return LinkResult.UNLINKED


# ---------------------------------------------------------------------------
# Equal-discrete-log proofs (the two-generator Schnorr building block)


@dataclass(frozen=True)
class DleqProof:
    c: Scalar
    t: Scalar


def _dleq_challenge(curve: CurveParams, g1, g2, y1, y2, a, b) -> Scalar:
    parts = [b"urs-dleq"]
    parts.extend(_transcript_enc(P) for P in (g1, g2, y1, y2, a, b))
    return hash_to_scalar(b"".join(parts), curve)


def dleq_prove(x: Scalar, g1: Point, g2: Point, rng) -> DleqProof:
    """Prove log_g1(x*g1) = log_g2(x*g2) without revealing x."""
    g1._same_curve(g2)
    curve = g1.curve
    if g1.is_infinity or g2.is_infinity:
        raise UrsError("generators must not be the identity")
    if x.modulus != curve.n:
        raise UrsError("witness scalar does not match the curve order")
    if x.value == 0:
        raise UrsError("zero witness is degenerate")
    r = curve.scalar(rng.randrange(curve.n))
    a = r * g1
    b = r * g2
    c = _dleq_challenge(curve, g1, g2, x * g1, x * g2, a, b)
    return DleqProof(c=c, t=r - c * x)


def dleq_verify(y1: Point, y2: Point, g1: Point, g2: Point,
                proof: DleqProof) -> bool:
    g1._same_curve(g2)
    g1._same_curve(y1)
    g1._same_curve(y2)
    curve = g1.curve
    if g1.is_infinity or g2.is_infinity:
        return False
    a = dual_scalar_mul(proof.t, g1, proof.c, y1)
    b = dual_scalar_mul(proof.t, g2, proof.c, y2)
    return proof.c == _dleq_challenge(curve, g1, g2, y1, y2, a, b)


# ---------------------------------------------------------------------------
# Wire format


def encode_signature(sig: Signature) -> bytes:
    """tau.x || tau.y || c_1 || t_1 || ... || c_n || t_n, big-endian.

    64*(n+1) bytes on secp256k1.  Message and ring are supplied by context
    on decode, so they are not serialized.
    """
    tau = sig.tau.point
    curve = tau.curve
    fb, sb = curve.field_bytes, curve.scalar_bytes
    parts = [tau.x.to_bytes(fb, "big"), tau.y.to_bytes(fb, "big")]
    for c, t in zip(sig.cs, sig.ts):
        parts.append(c.value.to_bytes(sb, "big"))
        parts.append(t.value.to_bytes(sb, "big"))
    return b"".join(parts)


def decode_signature(data: bytes, curve: CurveParams, msg: bytes,
                     ring: Ring | None = None) -> Signature:
    """Parse the wire form back into a Signature bound to (msg, ring).

    Rejects non-canonical scalars (>= n) and off-curve tags.  When a ring
    is supplied, the encoded pair count must match its size.
    """
    fb, sb = curve.field_bytes, curve.scalar_bytes
    body = len(data) - 2 * fb
    if body < 2 * sb:
        raise SignatureFormatError(
            f"{len(data)} bytes is shorter than a 1-member signature"
        )
    if body % (2 * sb) != 0:
        raise SignatureFormatError(f"{len(data)} bytes is not a valid length")
    count = body // (2 * sb)
    if ring is not None and count != len(ring):
        raise RingSizeMismatchError(
            f"signature covers {count} members, ring has {len(ring)}"
        )
    tx = int.from_bytes(data[:fb], "big")
    ty = int.from_bytes(data[fb:2 * fb], "big")
    if tx >= curve.p or ty >= curve.p:
        raise SignatureFormatError("tag coordinate out of field range")
    try:
        tau = Tag(Point(curve, tx, ty))
    except Exception as exc:
        raise SignatureFormatError(f"bad tag point: {exc}") from None
    cs = []
    ts = []
    off = 2 * fb
    for _ in range(count):
        c = int.from_bytes(data[off:off + sb], "big")
        t = int.from_bytes(data[off + sb:off + 2 * sb], "big")
        if c >= curve.n or t >= curve.n:
            raise SignatureFormatError("scalar out of range")
        cs.append(curve.scalar(c))
        ts.append(curve.scalar(t))
        off += 2 * sb
    ring_hash = ring.digest if ring is not None else b""
    return Signature(
        tau=tau,
        cs=tuple(cs),
        ts=tuple(ts),
        ring_hash=ring_hash,
        msg_hash=digest(msg),
    )
