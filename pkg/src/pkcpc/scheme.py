"""McEliece-style public-key encryption over polar codes.

The secret is a randomly chosen information set ``A(s)`` of the
natural-order polar transform together with a column permutation ``P``.
Key generation publishes only ``Q`` from the systematic matrix
``S^{-1} G_{A(s)} P = [I_k | Q]``, where the scrambler ``S`` is the
principal submatrix of ``G_n`` on ``A(s)``.

This is the raw scheme.  Ciphertexts are malleable and the systematic half
of ``c`` exposes ``m`` up to the error bits that land there; it must sit
behind a CCA2 conversion before it protects anything real.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .gf2 import (
    BitMatrix,
    BitVector,
    Permutation,
    gauss_jordan,
    invert,
    kron_power,
    submatrix,
)
from .polar import (
    ChannelSpec,
    PolarCode,
    bhattacharyya_profile,
    build_code,
    good_set,
    llr_from_hard,
    sc_decode_batch,
)

__all__ = [
    "SystemParams",
    "PublicKey",
    "PrivateKey",
    "Ciphertext",
    "DecodeFailure",
    "KeyFormatError",
    "max_error_weight",
    "keygen",
    "error_sample",
    "encrypt",
    "decrypt",
    "decrypt_batch",
    "serialize_public",
    "deserialize_public",
    "serialize_private",
    "deserialize_private",
    "encode_message_bits",
    "sample_errors",
]

PUBLIC_MAGIC = b"PKPC"
PRIVATE_MAGIC = b"PKPS"
FORMAT_VERSION = 1
DEFAULT_DESIGN_EPS = 0.01


class DecodeFailure(Exception):
    """Decryption produced a message whose re-encoding is too far from ``c``."""

    def __init__(self, message: str, blocks=None):
        super().__init__(message)
        self.blocks = blocks


class KeyFormatError(ValueError):
    pass


def max_error_weight(n: int) -> int:
    """``floor(2 sqrt(n) - 1)``: 31, 44, 63, 89, 127 for n = 256 ... 4096."""
    return math.isqrt(4 * n) - 1


@dataclass(frozen=True)
class SystemParams:
    m: int
    k: int
    design_eps: float = DEFAULT_DESIGN_EPS
    selection_policy: str = "all"
    t: int | None = None
    decode_p: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if not 1 <= self.m <= 16:
            raise ValueError(f"m must lie in [1, 16], got {self.m}")
        n = 1 << self.m
        if not 0 < self.k < n:
            raise ValueError(f"k must satisfy 0 < k < n = {n}, got {self.k}")
        if not 0.0 < self.design_eps < 1.0:
            raise ValueError(f"design_eps must lie in (0, 1), got {self.design_eps}")
        policy = self.selection_policy.lower()
        if policy not in ("all", "r0"):
            raise ValueError(f"selection_policy must be 'all' or 'r0', got {self.selection_policy!r}")
        object.__setattr__(self, "selection_policy", policy)
        t = max_error_weight(n) if self.t is None else int(self.t)
        if not 0 <= t <= max_error_weight(n):
            raise ValueError(f"t must lie in [0, {max_error_weight(n)}] for n = {n}, got {t}")
        object.__setattr__(self, "t", t)
        # tiny codes have t/n >= 1/2; the clamp keeps the default a valid BSC
        p = min(max(t, 1) / n, 0.25) if self.decode_p is None else float(self.decode_p)
        if not 0.0 < p < 0.5:
            raise ValueError(f"decode_p must lie in (0, 0.5), got {p}")
        object.__setattr__(self, "decode_p", p)

    @property
    def n(self) -> int:
        return 1 << self.m


@dataclass(frozen=True, eq=False)
class PublicKey:
    n: int
    k: int
    t: int
    q: BitMatrix

    def __post_init__(self):
        if self.q.shape != (self.k, self.n - self.k):
            raise ValueError(f"Q must be {self.k}x{self.n - self.k}, got {self.q.shape}")

    def matrix(self) -> BitMatrix:
        """The full ``k x n`` encryption matrix ``[I_k | Q]``."""
        return BitMatrix.identity(self.k).hstack(self.q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PublicKey):
            return NotImplemented
        return (self.n, self.k, self.t) == (other.n, other.k, other.t) and self.q == other.q


@dataclass(frozen=True, eq=False)
class PrivateKey:
    """Secret frozen set plus permutation; everything else is derived lazily."""

    params: SystemParams
    frozen_secret: np.ndarray
    perm: Permutation

    def __post_init__(self):
        n, k = self.params.n, self.params.k
        frozen = np.asarray(self.frozen_secret, dtype=np.int64)
        if frozen.shape != (n - k,):
            raise KeyFormatError(f"expected {n - k} frozen indices, got {frozen.size}")
        if frozen.size and (frozen[0] < 0 or frozen[-1] >= n or not (np.diff(frozen) > 0).all()):
            raise KeyFormatError("frozen indices must be distinct, sorted and below n")
        if self.perm.n != n:
            raise KeyFormatError(f"permutation has size {self.perm.n}, expected {n}")
        frozen.flags.writeable = False
        object.__setattr__(self, "frozen_secret", frozen)
        if not np.array_equal(self.perm.map[:k], self.info_set):
            raise KeyFormatError("the first k permutation columns must pin A(s) in ascending order")

    @cached_property
    def info_set(self) -> np.ndarray:
        mask = np.ones(self.params.n, dtype=bool)
        mask[self.frozen_secret] = False
        return np.flatnonzero(mask)

    @cached_property
    def code(self) -> PolarCode:
        return build_code(self.params.n, self.info_set)

    @property
    def gen(self) -> BitMatrix:
        return self.code.gen

    @cached_property
    def scrambler(self) -> BitMatrix:
        return submatrix(kron_power(self.params.m), self.info_set, self.info_set)

    @cached_property
    def scrambler_inv(self) -> BitMatrix:
        return invert(self.scrambler)

    def public_key(self) -> PublicKey:
        return _public_from(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PrivateKey):
            return NotImplemented
        return (
            self.params.n == other.params.n
            and self.params.k == other.params.k
            and np.array_equal(self.frozen_secret, other.frozen_secret)
            and self.perm == other.perm
        )


@dataclass(frozen=True)
class Ciphertext:
    body: BitVector

    def to_bytes(self) -> bytes:
        return self.body.to_bytes()

    @classmethod
    def from_bytes(cls, raw: bytes, n: int) -> "Ciphertext":
        if len(raw) != (n + 7) // 8:
            raise ValueError(f"a ciphertext for n = {n} is {(n + 7) // 8} bytes, got {len(raw)}")
        return cls(BitVector.from_bytes(raw, n))

    def __len__(self) -> int:
        return len(self.body)


def _rng(rng, seed):
    if rng is not None:
        return rng
    return np.random.default_rng(seed)


def _public_from(sk: PrivateKey) -> PublicKey:
    k = sk.params.k
    # G'' = G_{A(s)} P is a column gather whose first k columns must be S
    g2 = sk.gen.bits[:, sk.perm.map]
    if not np.array_equal(g2[:, :k], sk.scrambler.bits):
        raise RuntimeError("key self-check failed: leading block of G_A(s) P is not S")
    # row-reducing [S | G'''] with pivots in the first k columns applies S^-1 throughout
    systematic, pivots = gauss_jordan(g2, pivot_cols=range(k))
    if len(pivots) < k or not np.array_equal(systematic[:, :k], np.eye(k, dtype=np.uint8)):
        raise RuntimeError("key self-check failed: S^-1 G_A(s) P is not systematic")
    return PublicKey(n=sk.params.n, k=k, t=sk.params.t, q=BitMatrix.from_bits(systematic[:, k:]))


def keygen(params: SystemParams, rng=None, *, info_set=None, tail_order=None):
    """Generate ``(PublicKey, PrivateKey)``.

    ``info_set`` pins ``A(s)`` and ``tail_order`` pins the rows assigned to
    columns ``k .. n-1`` of ``P``; both exist for reproducible fixtures and
    draw from ``rng`` (default: seeded by ``params.seed``) when omitted.
    """
    rng = _rng(rng, params.seed)
    n, k = params.n, params.k
    if info_set is None:
        profile = bhattacharyya_profile(n, params.design_eps)
        pool = good_set(profile, params.selection_policy)
        if pool.size < k:
            raise ValueError(
                f"good set holds {pool.size} sub-channels, fewer than k = {k}; "
                "lower design_eps or use the 'all' policy"
            )
        info = np.sort(rng.choice(pool, size=k, replace=False))
    else:
        info = np.sort(np.asarray(info_set, dtype=np.int64))
        if info.size != k or np.unique(info).size != k or info[0] < 0 or info[-1] >= n:
            raise ValueError(f"info_set must hold {k} distinct indices below {n}")
    mask = np.ones(n, dtype=bool)
    mask[info] = False
    frozen = np.flatnonzero(mask)
    if tail_order is None:
        tail = rng.permutation(frozen)
    else:
        tail = np.asarray(tail_order, dtype=np.int64)
        if not np.array_equal(np.sort(tail), frozen):
            raise ValueError("tail_order must be an ordering of the frozen indices")
    perm = Permutation(np.concatenate([info, tail]))
    sk = PrivateKey(params=params, frozen_secret=frozen, perm=perm)
    return _public_from(sk), sk


def error_sample(n: int, w: int, rng=None) -> BitVector:
    """Uniformly random length-``n`` vector of Hamming weight exactly ``w``."""
    if not 0 <= w <= n:
        raise ValueError(f"weight must lie in [0, {n}], got {w}")
    rng = _rng(rng, None)
    bits = np.zeros(n, dtype=np.uint8)
    bits[rng.choice(n, size=w, replace=False)] = 1
    return BitVector.from_bits(bits)


def _codeword_bits(pk: PublicKey, msg: np.ndarray) -> np.ndarray:
    """Rows of ``[m | m Q]`` for a ``(batch, k)`` message array."""
    parity = msg.astype(np.float32) @ pk.q.bits.astype(np.float32)
    return np.hstack([msg, (parity.astype(np.int64) & 1).astype(np.uint8)])


def encrypt(pk: PublicKey, message: BitVector, error: BitVector | None = None, *, weight=None, rng=None):
    """``c = [m | m Q] + e``.

    Pass an explicit ``error`` or a ``weight`` for a freshly sampled one.
    """
    if len(message) != pk.k:
        raise ValueError(f"message must be {pk.k} bits, got {len(message)}")
    if error is None:
        if weight is None:
            raise ValueError("either an error vector or an error weight is required")
        if weight > pk.t:
            raise ValueError(f"error weight {weight} exceeds t = {pk.t}")
        error = error_sample(pk.n, weight, rng)
    if len(error) != pk.n:
        raise ValueError(f"error vector must be {pk.n} bits, got {len(error)}")
    if error.weight > pk.t:
        raise ValueError(f"error weight {error.weight} exceeds t = {pk.t}")
    word = _codeword_bits(pk, message.bits[None, :])[0]
    return Ciphertext(BitVector.from_bits(word ^ error.bits))


def decrypt_batch(sk: PrivateKey, bodies: np.ndarray, decode_p: float | None = None, t: int | None = None):
    """Decrypt a ``(batch, n)`` bit array of ciphertexts.

    Returns ``(messages, ok)``; ``ok[i]`` is False when the re-encoded
    message differs from ciphertext ``i`` in more than ``t`` positions.
    """
    params = sk.params
    bodies = np.asarray(bodies, dtype=np.uint8)
    if bodies.ndim != 2 or bodies.shape[1] != params.n:
        raise ValueError(f"expected ciphertexts of shape (batch, {params.n}), got {bodies.shape}")
    p = params.decode_p if decode_p is None else decode_p
    t = params.t if t is None else t
    # c' = c P^{-1}
    unpermuted = np.empty_like(bodies)
    unpermuted[:, sk.perm.map] = bodies
    llr = llr_from_hard(unpermuted, ChannelSpec.bsc(p))
    u_hat, x_hat = sc_decode_batch(sk.code, llr)
    u_info = u_hat[:, sk.info_set]
    s = sk.scrambler.bits.astype(np.float32)
    msgs = ((u_info.astype(np.float32) @ s).astype(np.int64) & 1).astype(np.uint8)
    # [m | mQ] P^{-1} equals the re-encoded polar codeword, so compare there
    distance = (x_hat ^ unpermuted).sum(axis=1)
    return msgs, distance <= t


def decrypt(sk: PrivateKey, c: Ciphertext, decode_p: float | None = None, t: int | None = None) -> BitVector:
    body = c.body if isinstance(c, Ciphertext) else c
    if len(body) != sk.params.n:
        raise ValueError(f"ciphertext must be {sk.params.n} bits, got {len(body)}")
    msgs, ok = decrypt_batch(sk, body.bits[None, :], decode_p, t)
    if not ok[0]:
        raise DecodeFailure("re-encoded message is farther than t from the ciphertext")
    return BitVector.from_bits(msgs[0])


def serialize_public(pk: PublicKey) -> bytes:
    m = pk.n.bit_length() - 1
    header = PUBLIC_MAGIC + struct.pack("<BBIH", FORMAT_VERSION, m, pk.k, pk.t)
    return header + pk.q.data.tobytes()


def _header(raw: bytes, magic: bytes, size: int, fmt: str):
    if len(raw) < size:
        raise KeyFormatError("truncated key header")
    if raw[:4] != magic:
        raise KeyFormatError(f"bad magic {raw[:4]!r}, expected {magic!r}")
    fields = struct.unpack(fmt, raw[4:size])
    if fields[0] != FORMAT_VERSION:
        raise KeyFormatError(f"unsupported format version {fields[0]}")
    return fields[1:]


def deserialize_public(raw: bytes) -> PublicKey:
    m, k, t = _header(raw, PUBLIC_MAGIC, 12, "<BBIH")
    n = 1 << m
    if not 0 < k < n:
        raise KeyFormatError(f"invalid dimensions n = {n}, k = {k}")
    row_bytes = (n - k + 7) // 8
    body = raw[12:]
    if len(body) != k * row_bytes:
        raise KeyFormatError(f"expected {k * row_bytes} payload bytes, got {len(body)}")
    data = np.frombuffer(body, dtype=np.uint8).reshape(k, row_bytes)
    try:
        q = BitMatrix(data, k, n - k)
    except ValueError as exc:
        raise KeyFormatError(str(exc)) from exc
    return PublicKey(n=n, k=k, t=t, q=q)


def serialize_private(sk: PrivateKey) -> bytes:
    params = sk.params
    header = PRIVATE_MAGIC + struct.pack("<BBI", FORMAT_VERSION, params.m, params.k)
    return (
        header
        + sk.frozen_secret.astype("<u2").tobytes()
        + sk.perm.map.astype("<u2").tobytes()
    )


def deserialize_private(raw: bytes, **overrides) -> PrivateKey:
    """Rebuild a private key; ``overrides`` feed :class:`SystemParams`
    fields the file does not store (``t``, ``decode_p``, ``design_eps``)."""
    m, k = _header(raw, PRIVATE_MAGIC, 10, "<BBI")
    n = 1 << m
    if not 0 < k < n:
        raise KeyFormatError(f"invalid dimensions n = {n}, k = {k}")
    body = raw[10:]
    if len(body) != 2 * (n - k + n):
        raise KeyFormatError(f"expected {2 * (2 * n - k)} payload bytes, got {len(body)}")
    frozen = np.frombuffer(body[: 2 * (n - k)], dtype="<u2").astype(np.int64)
    mapping = np.frombuffer(body[2 * (n - k) :], dtype="<u2").astype(np.int64)
    try:
        perm = Permutation(mapping)
    except ValueError as exc:
        raise KeyFormatError(str(exc)) from exc
    return PrivateKey(params=SystemParams(m=m, k=k, **overrides), frozen_secret=frozen, perm=perm)


def encode_message_bits(pk: PublicKey, messages: np.ndarray) -> np.ndarray:
    """Noise-free codewords ``[m | mQ]`` for a ``(batch, k)`` array."""
    return _codeword_bits(pk, np.asarray(messages, dtype=np.uint8))


def sample_errors(n: int, w: int, count: int, rng) -> np.ndarray:
    """``(count, n)`` array of independent weight-``w`` error patterns."""
    if not 0 <= w <= n:
        raise ValueError(f"weight must lie in [0, {n}], got {w}")
    keys = rng.random((count, n))
    positions = np.argpartition(keys, w, axis=1)[:, :w] if 0 < w < n else None
    out = np.zeros((count, n), dtype=np.uint8)
    if w == n:
        out[:] = 1
    elif positions is not None:
        np.put_along_axis(out, positions, 1, axis=1)
    return out

