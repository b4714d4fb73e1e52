"""Simulated coin-mixing contract gated by unique ring signatures.

A pool collects equal-denomination deposits, each registering a fresh
public key from an off-ledger key pair.  When the pool reaches capacity it
publishes the canonical ring of those keys.  Withdrawals present a ring
signature over the pool's withdrawal message; the signature proves
membership without identifying the member, and its tag makes a second
withdrawal by the same member collide in the seen-tag set.

The withdrawal message binds the payout address (``mix_id|payout``), so a
relay cannot swap its own address into an observed withdrawal.  The flip
side, documented in README security notes: because tags are per-message, a
member who signs again for a *different* payout address produces a fresh
tag.  The pool can never pay out more than was deposited (every payout is
balance-checked), but honest-member starvation by such a double-claimer is
not detectable from signatures alone.

The ledger is an in-process map persisted as a versioned, deterministic
JSON document; there is no chain underneath.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .curve import CurveParams, CURVES, Point, Scalar
from .hashing import HashVariant, insecure_hash_exponent
from .urs import (
    PublicParams,
    Ring,
    RingSizeMismatchError,
    Signature,
    SignatureFormatError,
    decode_signature,
    ring_message_bytes,
    ring_message_point,
    ring_verify,
    setup,
)

STATE_VERSION = 1


class MixerError(Exception):
    """Ledger or pool operation failed."""


class UnknownAccountError(MixerError):
    pass


class UnknownPoolError(MixerError):
    pass


class PhaseError(MixerError):
    """Operation attempted outside its lifecycle phase."""


class Phase(enum.Enum):
    FILLING = "filling"
    RING_PUBLISHED = "ring-published"
    CLOSED = "closed"


class WithdrawStatus(enum.Enum):
    ACCEPTED = "accepted"
    BAD_SIGNATURE = "bad-signature"
    WRONG_RING = "wrong-ring"
    TAG_REUSE = "tag-reuse"
    WRONG_PHASE = "wrong-phase"
    POOL_EMPTY = "pool-empty"


def withdraw_message(mix_id: str, payout_address: str) -> bytes:
    """Canonical signed message for a withdrawal.

    Generated mix ids never contain '|', so the split is unambiguous.
    """
    return f"{mix_id}|{payout_address}".encode()


@dataclass
class MixPool:
    mix_id: str
    denomination: int
    capacity: int
    phase: Phase = Phase.FILLING
    deposits: list[tuple[str, str]] = field(default_factory=list)  # (pk hex, funder)
    seen_tags: set[bytes] = field(default_factory=set)
    payouts: list[tuple[str, str]] = field(default_factory=list)  # (address, tag hex)
    refunds: list[str] = field(default_factory=list)
    balance: int = 0

    def ring(self, curve: CurveParams) -> Ring:
        if self.phase is Phase.FILLING:
            raise PhaseError(f"{self.mix_id}: ring not published yet")
        return Ring(Point.decode(curve, bytes.fromhex(pk)) for pk, _ in self.deposits)


class Mixer:
    """Single-writer contract simulator: accounts, pools, tag sets."""

    def __init__(self, pp: PublicParams):
        self.pp = pp
        self.accounts: dict[str, int] = {}
        self.pools: dict[str, MixPool] = {}
        self._next_seq = 1

    # -- ledger plumbing ----------------------------------------------------

    def fund(self, address: str, amount: int) -> None:
        if amount < 0:
            raise MixerError("cannot fund a negative amount")
        self.accounts[address] = self.accounts.get(address, 0) + amount

    def balance(self, address: str) -> int:
        return self.accounts.get(address, 0)

    def _debit(self, address: str, amount: int) -> None:
        have = self.accounts.get(address)
        if have is None:
            raise UnknownAccountError(f"no account {address!r}")
        if have < amount:
            raise MixerError(f"{address!r} holds {have}, needs {amount}")
        self.accounts[address] = have - amount

    def _credit(self, address: str, amount: int) -> None:
        self.accounts[address] = self.accounts.get(address, 0) + amount

    def _pool(self, mix_id: str) -> MixPool:
        try:
            return self.pools[mix_id]
        except KeyError:
            raise UnknownPoolError(f"no pool {mix_id!r}") from None

    # -- lifecycle ------------------------------------------------------------

    def mix_create(self, denomination: int, capacity: int) -> str:
        if denomination <= 0:
            raise MixerError("denomination must be positive")
        if capacity < 2:
            raise MixerError("capacity below 2 makes the anonymity set trivial")
        mix_id = f"mix-{self._next_seq:04d}"
        self._next_seq += 1
        self.pools[mix_id] = MixPool(
            mix_id=mix_id, denomination=denomination, capacity=capacity
        )
        return mix_id

    def mix_deposit(self, mix_id: str, pk: Point, from_account: str) -> int:
        """Escrow one denomination and register pk.  Returns the fill count.

        The capacity-reaching deposit flips the pool to RING_PUBLISHED.
        """
        pool = self._pool(mix_id)
        if pool.phase is not Phase.FILLING:
            raise PhaseError(f"{mix_id} is not accepting deposits")
        if pk.is_infinity or pk.curve != self.pp.curve:
            raise MixerError("deposit key is not a valid point on the mix curve")
        pk_hex = pk.encode().hex()
        if any(existing == pk_hex for existing, _ in pool.deposits):
            raise MixerError("public key already deposited in this pool")
        self._debit(from_account, pool.denomination)
        pool.balance += pool.denomination
        pool.deposits.append((pk_hex, from_account))
        if len(pool.deposits) == pool.capacity:
            pool.phase = Phase.RING_PUBLISHED
        return len(pool.deposits)

    def mix_ring(self, mix_id: str) -> Ring:
        return self._pool(mix_id).ring(self.pp.curve)

    def mix_withdraw(self, mix_id: str, sig_bytes: bytes,
                     payout_address: str) -> WithdrawStatus:
        """Verify, check the tag set, then pay out, as one atomic step.

        The tag enters seen_tags only on success, so a failed attempt does
        not burn the member's withdrawal right.
        """
        pool = self._pool(mix_id)
        if pool.phase is not Phase.RING_PUBLISHED:
            return WithdrawStatus.WRONG_PHASE
        ring = pool.ring(self.pp.curve)
        msg = withdraw_message(mix_id, payout_address)
        try:
            sig = decode_signature(sig_bytes, self.pp.curve, msg, ring)
        except RingSizeMismatchError:
            return WithdrawStatus.WRONG_RING
        except SignatureFormatError:
            return WithdrawStatus.BAD_SIGNATURE
        if not ring_verify(self.pp, ring, msg, sig):
            return WithdrawStatus.BAD_SIGNATURE
        tag_bytes = sig.tau.point.encode()
        if tag_bytes in pool.seen_tags:
            return WithdrawStatus.TAG_REUSE
        if pool.balance < pool.denomination:
            return WithdrawStatus.POOL_EMPTY
        pool.seen_tags.add(tag_bytes)
        pool.balance -= pool.denomination
        self._credit(payout_address, pool.denomination)
        pool.payouts.append((payout_address, tag_bytes.hex()))
        return WithdrawStatus.ACCEPTED

    def mix_close(self, mix_id: str) -> None:
        """Administratively close an under-filled pool, refunding deposits."""
        pool = self._pool(mix_id)
        if pool.phase is not Phase.FILLING:
            raise PhaseError("only a filling pool can be closed with refunds")
        for _, funder in pool.deposits:
            self._credit(funder, pool.denomination)
            pool.refunds.append(funder)
            pool.balance -= pool.denomination
        pool.phase = Phase.CLOSED

    def mix_status(self, mix_id: str) -> dict:
        pool = self._pool(mix_id)
        return {
            "mix_id": pool.mix_id,
            "phase": pool.phase.value,
            "denomination": pool.denomination,
            "capacity": pool.capacity,
            "deposits": len(pool.deposits),
            "tags_seen": len(pool.seen_tags),
            "payouts": len(pool.payouts),
            "balance": pool.balance,
        }

    def check_conservation(self, mix_id: str) -> None:
        """denomination * deposits == payouts + refunds + remaining balance."""
        pool = self._pool(mix_id)
        if pool.balance < 0:
            raise MixerError(f"{mix_id}: negative balance {pool.balance}")
        moved_in = pool.denomination * len(pool.deposits)
        moved_out = pool.denomination * (len(pool.payouts) + len(pool.refunds))
        if moved_in != moved_out + pool.balance:
            raise MixerError(
                f"{mix_id}: conservation broken, in={moved_in} "
                f"out={moved_out} balance={pool.balance}"
            )
        if len(pool.payouts) != len(pool.seen_tags):
            raise MixerError(f"{mix_id}: payout/tag count mismatch")


# ---------------------------------------------------------------------------
# Attack demonstrations


def attack_naive_hash(ring: Ring, sig: Signature, msg: bytes) -> int | None:
    """Recover the signer index from a generator-multiple-hash signature.

    Under that hash, H(m||R) = e*g for a publicly computable e, so the tag
    sk*H(m||R) equals e*pk: a pure function of public values.  Comparing
    e*pk against the tag for each ring member names the signer.  Returns
    None when nothing matches, which is the expected outcome against the
    secure hash variants.
    """
    curve = ring.curve
    e = insecure_hash_exponent(ring_message_bytes(msg, ring), curve)
    for idx, pk in enumerate(ring):
        if e * pk == sig.tau.point:
            return idx
    return None


def attack_tag_reveal(pp: PublicParams, ring: Ring, sig: Signature, msg: bytes,
                      revealed_sks: list[Scalar]) -> list[int]:
    """Shrink the anonymity set using keys volunteered by ring members.

    Each revealed key lets anyone compute that member's would-be tag for
    this (message, ring); a mismatch with the signature's tag eliminates
    the member.  With n-1 reveals the honest signer stands alone.
    """
    h = ring_message_point(pp, msg, ring)
    g = pp.curve.g
    survivors = set(range(len(ring)))
    for sk in revealed_sks:
        idx = ring.index_of(sk * g)  # raises if the key is not a member
        if sk * h != sig.tau.point:
            survivors.discard(idx)
    return sorted(survivors)


# ---------------------------------------------------------------------------
# State file


def save_state(mixer: Mixer, path: str) -> None:
    """Write the whole ledger as deterministic, human-readable JSON."""
    doc = {
        "version": STATE_VERSION,
        "params": {
            "curve": mixer.pp.curve.curve_id,
            "hash": mixer.pp.h_variant.value,
            "security_bits": mixer.pp.security_bits,
            "insecure_override": mixer.pp.insecure_override,
        },
        "next_pool_seq": mixer._next_seq,
        "accounts": dict(sorted(mixer.accounts.items())),
        "pools": {
            mix_id: {
                "denomination": pool.denomination,
                "capacity": pool.capacity,
                "phase": pool.phase.value,
                "deposits": [
                    {"pk": pk, "from": funder} for pk, funder in pool.deposits
                ],
                "seen_tags": sorted(tag.hex() for tag in pool.seen_tags),
                "payouts": [
                    {"address": addr, "tag": tag} for addr, tag in pool.payouts
                ],
                "refunds": list(pool.refunds),
                "balance": pool.balance,
            }
            for mix_id, pool in sorted(mixer.pools.items())
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_state(path: str) -> Mixer:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != STATE_VERSION:
        raise MixerError(f"unsupported state version {doc.get('version')!r}")
    params = doc["params"]
    curve = CURVES.get(params["curve"])
    if curve is None:
        raise MixerError(f"unknown curve {params['curve']!r} in state file")
    pp = setup(
        params["security_bits"],
        curve,
        HashVariant(params["hash"]),
        insecure_override=params.get("insecure_override", False),
    )
    mixer = Mixer(pp)
    mixer._next_seq = doc["next_pool_seq"]
    mixer.accounts = dict(doc["accounts"])
    for mix_id, rec in doc["pools"].items():
        pool = MixPool(
            mix_id=mix_id,
            denomination=rec["denomination"],
            capacity=rec["capacity"],
            phase=Phase(rec["phase"]),
            deposits=[(d["pk"], d["from"]) for d in rec["deposits"]],
            seen_tags={bytes.fromhex(t) for t in rec["seen_tags"]},
            payouts=[(pmt["address"], pmt["tag"]) for pmt in rec["payouts"]],
            refunds=list(rec["refunds"]),
            balance=rec["balance"],
        )
        mixer.pools[mix_id] = pool
    return mixer
