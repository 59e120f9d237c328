"""Code-based public-key encryption built on polar codes.

The package is layered: :mod:`pkcpc.gf2` does packed GF(2) linear algebra,
:mod:`pkcpc.polar` constructs, encodes and SC-decodes polar codes,
:mod:`pkcpc.scheme` is the McEliece-style cryptosystem on top of them, and
:mod:`pkcpc.security` estimates information-set-decoding attack cost.
"""

from .estimators import PKCPCEncryptor, PolarCodec
from .gf2 import BitMatrix, BitVector, Permutation, SingularMatrixError
from .polar import (
    ChannelSpec,
    CodeProfile,
    PolarCode,
    bhattacharyya_profile,
    build_code,
    cutoff_rate,
    encode,
    good_set,
    sc_decode,
    sc_decode_batch,
)
from .scheme import (
    Ciphertext,
    DecodeFailure,
    KeyFormatError,
    PrivateKey,
    PublicKey,
    SystemParams,
    decrypt,
    deserialize_private,
    deserialize_public,
    encrypt,
    keygen,
    serialize_private,
    serialize_public,
)
from .security import SecurityReport, SternParams, optimize_stern, security_report, stern_search, stern_workfactor

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "BitVector",
    "ChannelSpec",
    "Ciphertext",
    "CodeProfile",
    "DecodeFailure",
    "KeyFormatError",
    "PKCPCEncryptor",
    "Permutation",
    "PolarCode",
    "PolarCodec",
    "PrivateKey",
    "PublicKey",
    "SecurityReport",
    "SingularMatrixError",
    "SternParams",
    "SystemParams",
    "bhattacharyya_profile",
    "build_code",
    "cutoff_rate",
    "decrypt",
    "deserialize_private",
    "deserialize_public",
    "encode",
    "encrypt",
    "good_set",
    "keygen",
    "optimize_stern",
    "sc_decode",
    "sc_decode_batch",
    "security_report",
    "serialize_private",
    "serialize_public",
    "stern_search",
    "stern_workfactor",
]
