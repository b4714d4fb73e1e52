"""Unique ring signatures over secp256k1 plus a simulated mixing contract."""

from .curve import (
    CURVES,
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
    dual_scalar_mul,
)
from .hashing import (
    FtConstants,
    HashToCurveError,
    HashVariant,
    UnsupportedCurveError,
    ft_fallback_point,
    ft_map,
    hash_to_curve,
    hash_to_curve_ft,
    hash_to_field,
    hash_to_scalar,
    insecure_hash_exponent,
    insecure_hash_mult_g,
    try_and_increment,
    try_and_increment_field,
)
from .urs import (
    DleqProof,
    InsecureVariantError,
    KeyPair,
    LinkResult,
    PublicParams,
    Ring,
    RingError,
    RingSizeMismatchError,
    Signature,
    SignatureFormatError,
    SignerNotInRingError,
    Tag,
    UrsError,
    canonical_ring,
    decode_signature,
    dleq_prove,
    dleq_verify,
    encode_signature,
    link,
    ring_gen,
    ring_message_bytes,
    ring_message_point,
    ring_sign,
    ring_verify,
    setup,
    tag_of,
)
from .mixer import (
    Mixer,
    MixerError,
    Phase,
    PhaseError,
    UnknownAccountError,
    UnknownPoolError,
    WithdrawStatus,
    attack_naive_hash,
    attack_tag_reveal,
    load_state,
    save_state,
    withdraw_message,
)

__version__ = "0.1.0"
