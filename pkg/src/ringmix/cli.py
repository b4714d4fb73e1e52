"""Command-line interface: keygen, sign/verify/link, the mix lifecycle,
attack demos, and benchmarks.

Exit codes are a stable scripting contract: 0 success or accept, 1 verify
or withdraw reject (and failed link precondition), 2 usage error, 3 state
or input error.

All outputs are single machine-readable lines; hex is lowercase.  With
--seed every command is deterministic, including generated keys and the
state file bytes, which is what the reproducible test scenarios use.
Without --seed, key material comes from the system entropy pool.
"""

from __future__ import annotations

import argparse
import fcntl
import os
import random
import sys
import time

from .curve import CURVES, CurveError, Point, fe_hex
from .hashing import HashVariant
from .mixer import (
    Mixer,
    MixerError,
    WithdrawStatus,
    attack_naive_hash,
    attack_tag_reveal,
    load_state,
    save_state,
    withdraw_message,
)
from .urs import (
    LinkResult,
    PublicParams,
    Ring,
    UrsError,
    canonical_ring,
    decode_signature,
    encode_signature,
    link,
    ring_gen,
    ring_sign,
    ring_verify,
    setup,
)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_USAGE = 2
EXIT_STATE = 3

_HASH_FLAGS = {v.value: v for v in HashVariant}


class CliError(Exception):
    """Input problem that maps to the state-error exit code."""


def _build_params(args) -> PublicParams:
    curve = CURVES[args.curve]
    variant = _HASH_FLAGS[args.hash]
    try:
        return setup(
            128, curve, variant, insecure_override=args.allow_insecure
        )
    except UrsError as exc:
        raise CliError(str(exc)) from None


def _rng(args):
    if args.seed is not None:
        return random.Random(args.seed)
    return random.SystemRandom()


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from None


def _message_bytes(args) -> bytes:
    if getattr(args, "msg_hex", None):
        try:
            return bytes.fromhex(args.msg_hex)
        except ValueError:
            raise CliError("--msg-hex is not valid hex") from None
    if args.msg is None:
        raise CliError("a message is required (--msg or --msg-hex)")
    return args.msg.encode()


def _sig_bytes(value: str) -> bytes:
    # "@path" reads the hex from a file, anything else is inline hex
    if value.startswith("@"):
        value = _read_text(value[1:]).strip()
    try:
        return bytes.fromhex(value)
    except ValueError:
        raise CliError("signature is not valid hex") from None


def _load_ring(path: str, pp: PublicParams) -> Ring:
    pks = []
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            pks.append(Point.decode(pp.curve, bytes.fromhex(line)))
        except (ValueError, CurveError) as exc:
            raise CliError(f"{path}:{lineno}: {exc}") from None
    try:
        return canonical_ring(pks)
    except UrsError as exc:
        raise CliError(f"{path}: {exc}") from None


def _load_key(path: str, pp: PublicParams):
    raw = _read_text(path).strip()
    try:
        value = int(raw, 16)
    except ValueError:
        raise CliError(f"{path}: secret key file is not hex") from None
    if not 0 < value < pp.curve.n:
        raise CliError(f"{path}: secret key out of range")
    return pp.curve.scalar(value)


# ---------------------------------------------------------------------------
# Signature commands


def cmd_keygen(args, pp: PublicParams) -> int:
    pair = ring_gen(pp, _rng(args))
    sk_path = args.out + ".sk"
    pk_path = args.out + ".pk"
    sk_hex = fe_hex(pair.sk, pp.curve.scalar_bytes)
    with open(sk_path, "w", encoding="utf-8") as fh:
        fh.write(sk_hex + "\n")
    os.chmod(sk_path, 0o600)
    with open(pk_path, "w", encoding="utf-8") as fh:
        fh.write(pair.pk.encode().hex() + "\n")
    print(pair.pk.encode().hex())
    return EXIT_OK


def cmd_sign(args, pp: PublicParams) -> int:
    sk = _load_key(args.key, pp)
    ring = _load_ring(args.ring, pp)
    msg = _message_bytes(args)
    try:
        sig = ring_sign(pp, sk, ring, msg, _rng(args))
    except UrsError as exc:
        raise CliError(str(exc)) from None
    hexsig = encode_signature(sig).hex()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(hexsig + "\n")
    print(hexsig)
    return EXIT_OK


def _decode_or_reject(pp, data, msg, ring):
    try:
        return decode_signature(data, pp.curve, msg, ring)
    except UrsError:
        return None


def cmd_verify(args, pp: PublicParams) -> int:
    ring = _load_ring(args.ring, pp)
    msg = _message_bytes(args)
    sig = _decode_or_reject(pp, _sig_bytes(args.sig), msg, ring)
    if sig is not None and ring_verify(pp, ring, msg, sig):
        print("ACCEPT")
        return EXIT_OK
    print("REJECT")
    return EXIT_REJECT


def cmd_link(args, pp: PublicParams) -> int:
    ring = _load_ring(args.ring, pp)
    msg = _message_bytes(args)
    sigs = []
    for label, value in (("sig1", args.sig1), ("sig2", args.sig2)):
        sig = _decode_or_reject(pp, _sig_bytes(value), msg, ring)
        if sig is None or not ring_verify(pp, ring, msg, sig):
            print(f"REJECT {label}")
            return EXIT_REJECT
        sigs.append(sig)
    print(link(sigs[0], sigs[1]).value.upper())
    return EXIT_OK


# ---------------------------------------------------------------------------
# Mix commands


class _StateLock:
    def __init__(self, path: str):
        self._path = path + ".lock"
        self._fh = None

    def __enter__(self):
        self._fh = open(self._path, "w")
        fcntl.flock(self._fh, fcntl.LOCK_EX)
        return self

    def __exit__(self, *exc):
        fcntl.flock(self._fh, fcntl.LOCK_UN)
        self._fh.close()


def _load_mixer(args, pp: PublicParams) -> Mixer:
    if os.path.exists(args.state):
        return load_state(args.state)
    return Mixer(pp)


def cmd_mix(args, pp: PublicParams) -> int:
    with _StateLock(args.state):
        mixer = _load_mixer(args, pp)
        rc = EXIT_OK
        if args.mix_cmd == "create":
            mix_id = mixer.mix_create(args.denomination, args.capacity)
            print(mix_id)
        elif args.mix_cmd == "fund":
            mixer.fund(args.account, args.amount)
            print(f"{args.account} {mixer.balance(args.account)}")
        elif args.mix_cmd == "deposit":
            pk_hex = args.pk
            if os.path.exists(pk_hex):
                pk_hex = _read_text(pk_hex).strip()
            try:
                pk = Point.decode(pp.curve, bytes.fromhex(pk_hex))
            except (ValueError, CurveError) as exc:
                raise CliError(f"bad public key: {exc}") from None
            count = mixer.mix_deposit(args.mix, pk, getattr(args, "from"))
            print(f"deposits {count}/{mixer.pools[args.mix].capacity}")
        elif args.mix_cmd == "ring":
            ring = mixer.mix_ring(args.mix)
            for pk in ring:
                print(pk.encode().hex())
        elif args.mix_cmd == "message":
            print(withdraw_message(args.mix, args.payout).decode())
        elif args.mix_cmd == "withdraw":
            status = mixer.mix_withdraw(
                args.mix, _sig_bytes(args.sig), args.payout
            )
            print(status.value.upper().replace("-", "_"))
            rc = EXIT_OK if status is WithdrawStatus.ACCEPTED else EXIT_REJECT
        elif args.mix_cmd == "status":
            info = mixer.mix_status(args.mix)
            print(" ".join(f"{k}={v}" for k, v in info.items()))
        else:  # pragma: no cover - argparse restricts choices
            raise CliError(f"unknown mix command {args.mix_cmd!r}")
        save_state(mixer, args.state)
    return rc


# ---------------------------------------------------------------------------
# Attack demos and benchmarks


def cmd_attack(args, pp: PublicParams) -> int:
    ring = _load_ring(args.ring, pp)
    msg = _message_bytes(args)
    sig = _decode_or_reject(pp, _sig_bytes(args.sig), msg, ring)
    if sig is None:
        raise CliError("signature does not parse against this ring")
    if args.attack_cmd == "naive-hash":
        idx = attack_naive_hash(ring, sig, msg)
        if idx is None:
            print("attack-failed")
        else:
            print(f"signer-index {idx}")
        return EXIT_OK
    # tag-reveal
    sks = [_load_key(path, pp) for path in args.keys.split(",")]
    try:
        survivors = attack_tag_reveal(pp, ring, sig, msg, sks)
    except UrsError as exc:
        raise CliError(str(exc)) from None
    print("anonymity-set " + ",".join(str(i) for i in survivors))
    return EXIT_OK


def cmd_bench(args, pp: PublicParams) -> int:
    rng = _rng(args)
    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"{'ring':>6} {'sign_ms':>10} {'verify_ms':>10} {'sig_bytes':>10}")
    for size in sizes:
        keys = []
        seen = set()
        attempts = 0
        while len(keys) < size:  # tiny curves can collide, resample
            attempts += 1
            if attempts > 100 * size:
                raise CliError(f"cannot draw {size} distinct keys on this curve")
            pair = ring_gen(pp, rng)
            if pair.pk not in seen:
                seen.add(pair.pk)
                keys.append(pair)
        ring = canonical_ring([k.pk for k in keys])
        msg = f"bench-{size}".encode()
        t0 = time.perf_counter()
        sig = ring_sign(pp, keys[0].sk, ring, msg, rng)
        t1 = time.perf_counter()
        ok = ring_verify(pp, ring, msg, sig)
        t2 = time.perf_counter()
        if not ok:
            raise CliError(f"benchmark signature failed to verify at size {size}")
        blob = encode_signature(sig)
        print(f"{size:>6} {(t1 - t0) * 1000:>10.2f} {(t2 - t1) * 1000:>10.2f} "
              f"{len(blob):>10}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringmix",
        description="Unique ring signatures and a simulated mixing contract.",
    )
    parser.add_argument("--curve", choices=sorted(CURVES), default="secp256k1")
    parser.add_argument("--hash", choices=sorted(_HASH_FLAGS), default="ft")
    parser.add_argument("--allow-insecure", action="store_true",
                        help="permit the generator-multiple hash (demos only)")
    parser.add_argument("--state", default="ringmix-state.json",
                        help="mix ledger state file")
    parser.add_argument("--seed", type=int, default=None,
                        help="deterministic randomness for reproducible runs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="write <out>.sk and <out>.pk")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    for name, func in (("sign", cmd_sign), ("verify", cmd_verify),
                       ("link", cmd_link)):
        p = sub.add_parser(name)
        p.add_argument("--ring", required=True, help="file of hex public keys")
        p.add_argument("--msg")
        p.add_argument("--msg-hex")
        if name == "sign":
            p.add_argument("--key", required=True, help="secret key file")
            p.add_argument("--out")
        elif name == "verify":
            p.add_argument("--sig", required=True, help="hex or @file")
        else:
            p.add_argument("--sig1", required=True)
            p.add_argument("--sig2", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("mix", help="pool lifecycle against the state file")
    mix_sub = p.add_subparsers(dest="mix_cmd", required=True)
    q = mix_sub.add_parser("create")
    q.add_argument("--denomination", type=int, required=True)
    q.add_argument("--capacity", type=int, required=True)
    q = mix_sub.add_parser("fund")
    q.add_argument("--account", required=True)
    q.add_argument("--amount", type=int, required=True)
    q = mix_sub.add_parser("deposit")
    q.add_argument("--mix", required=True)
    q.add_argument("--pk", required=True, help="hex public key or file")
    q.add_argument("--from", required=True, dest="from")
    q = mix_sub.add_parser("ring")
    q.add_argument("--mix", required=True)
    q = mix_sub.add_parser("message")
    q.add_argument("--mix", required=True)
    q.add_argument("--payout", required=True)
    q = mix_sub.add_parser("withdraw")
    q.add_argument("--mix", required=True)
    q.add_argument("--sig", required=True)
    q.add_argument("--payout", required=True)
    q = mix_sub.add_parser("status")
    q.add_argument("--mix", required=True)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("attack", help="run a deanonymization demo")
    attack_sub = p.add_subparsers(dest="attack_cmd", required=True)
    for name in ("naive-hash", "tag-reveal"):
        q = attack_sub.add_parser(name)
        q.add_argument("--ring", required=True)
        q.add_argument("--msg")
        q.add_argument("--msg-hex")
        q.add_argument("--sig", required=True)
        if name == "tag-reveal":
            q.add_argument("--keys", required=True,
                           help="comma-separated secret key files")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("bench", help="sign/verify timings and sizes")
    p.add_argument("--sizes", default="2,4,8,16")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        pp = _build_params(args)
        return args.func(args, pp)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATE
    except MixerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATE


if __name__ == "__main__":
    sys.exit(main())
