"""Polar-code construction, encoding and successive-cancellation decoding.

Codes use the natural-order transform ``x = u G_2^{(x)m}``; the Bhattacharyya
profile is indexed the same way, so ``profile.z[i]`` is the reliability of
input bit ``u_i`` under the shipped encoder and SC decoder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gf2 import BitMatrix, BitVector, Permutation, bit_reversal_perm, kron_power, submatrix

__all__ = [
    "BEC_SCALING_EXPONENT",
    "ChannelSpec",
    "CodeProfile",
    "PolarCode",
    "bhattacharyya_profile",
    "cutoff_rate",
    "good_set",
    "build_code",
    "build_parity_check",
    "polar_transform",
    "encode",
    "sc_decode",
    "sc_decode_batch",
    "llr_from_hard",
    "llr_from_erasures",
]

BEC_SCALING_EXPONENT = 3.627
# stands in for +-inf so that g-updates never produce inf - inf
LLR_CLIP = 1e12


def _exponent(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"block length must be a power of two, got {n}")
    return n.bit_length() - 1


@dataclass(frozen=True)
class ChannelSpec:
    kind: str
    param: float

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        if kind == "BEC":
            if not 0.0 < self.param < 1.0:
                raise ValueError(f"BEC erasure probability must lie in (0, 1), got {self.param}")
        elif kind == "BSC":
            if not 0.0 < self.param < 0.5:
                raise ValueError(f"BSC crossover must lie in (0, 0.5), got {self.param}")
        else:
            raise ValueError(f"unknown channel kind {self.kind!r}")

    @classmethod
    def bec(cls, eps: float) -> "ChannelSpec":
        return cls("BEC", eps)

    @classmethod
    def bsc(cls, p: float) -> "ChannelSpec":
        return cls("BSC", p)

    @property
    def capacity(self) -> float:
        if self.kind == "BEC":
            return 1.0 - self.param
        p = self.param
        return 1.0 + p * math.log2(p) + (1 - p) * math.log2(1 - p)


@dataclass(frozen=True, eq=False)
class CodeProfile:
    """Per-bit-channel Bhattacharyya parameters for a BEC-designed code.

    ``pi.map`` lists bit indices from most to least reliable (ascending Z,
    ties to the lower index).
    """

    n: int
    eps: float
    z: np.ndarray
    pi: Permutation
    r0: float
    mu: float = BEC_SCALING_EXPONENT
    block_order: bool = False
    log_z: np.ndarray = field(repr=False, default=None)

    @property
    def rank(self) -> np.ndarray:
        """Position of each bit index inside ``pi``."""
        return self.pi.inverse().map


@dataclass(frozen=True, eq=False)
class PolarCode:
    n: int
    k: int
    info_set: np.ndarray
    frozen_set: np.ndarray
    gen: BitMatrix
    frozen_gen: BitMatrix
    bit_reversed: bool = False
    frozen_mask: np.ndarray = field(repr=False, default=None)

    @property
    def rate(self) -> float:
        return self.k / self.n


def _log1mexp(x: np.ndarray) -> np.ndarray:
    """log(1 - exp(x)) for x <= 0, accurate at both ends."""
    with np.errstate(divide="ignore"):
        return np.where(x > -math.log(2), np.log(-np.expm1(x)), np.log1p(-np.exp(x)))


def bhattacharyya_profile(
    n: int, eps: float, mu: float = BEC_SCALING_EXPONENT, block_order: bool = False
) -> CodeProfile:
    """Bhattacharyya parameters of the ``n`` bit channels over BEC(eps).

    Each doubling step maps a parameter Z to ``2Z - Z^2`` (check-node side)
    and ``Z^2`` (variable-node side).  By default the pair is interleaved,
    which is the labelling seen by the natural-order encoder.  ``block_order``
    instead stacks all check-node values before all variable-node values;
    that block layout is the bit reversal of the default and is provided for
    reproducing published listings only.

    The recursion runs on ``log Z`` and ``log(1 - Z)`` together so that
    neither very reliable nor very noisy channels collapse into ties.
    """
    _exponent(n)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"erasure probability must lie in (0, 1), got {eps}")
    log_z = np.array([math.log(eps)])
    log_c = np.array([math.log1p(-eps)])
    while log_z.size < n:
        small = log_z < -math.log(2)
        z_cur = np.exp(log_z)
        # 2Z - Z^2 and 1 - Z^2, each from whichever log is still informative
        minus_c = 2 * log_c
        minus_z = np.where(small, log_z + np.log(2 - z_cur), _log1mexp(minus_c))
        plus_z = 2 * log_z
        plus_c = np.where(small, _log1mexp(plus_z), log_c + np.log1p(z_cur))
        if block_order:
            log_z = np.concatenate([minus_z, plus_z])
            log_c = np.concatenate([minus_c, plus_c])
        else:
            log_z = np.stack([minus_z, plus_z], axis=1).reshape(-1)
            log_c = np.stack([minus_c, plus_c], axis=1).reshape(-1)
    z = np.exp(log_z)
    # monotone in Z and free of rounding ties at either end
    key = np.where(z < 0.5, log_z, -log_c)
    pi = Permutation(np.argsort(key, kind="stable"))
    z.flags.writeable = False
    log_z.flags.writeable = False
    r0 = cutoff_rate(n, ChannelSpec.bec(eps), mu) if n >= 2 else 0.0
    return CodeProfile(n=n, eps=eps, z=z, pi=pi, r0=r0, mu=mu, block_order=block_order, log_z=log_z)


def cutoff_rate(n: int, channel, mu: float = BEC_SCALING_EXPONENT) -> float:
    """Largest rate with ``R < I(W) - n^(-1/mu)``, clamped to ``[0, 1]``.

    ``channel`` is a :class:`ChannelSpec` or a bare capacity in ``[0, 1]``.
    """
    if n < 2:
        raise ValueError("cutoff rate needs n >= 2")
    capacity = channel.capacity if isinstance(channel, ChannelSpec) else float(channel)
    if not 0.0 <= capacity <= 1.0:
        raise ValueError(f"capacity must lie in [0, 1], got {capacity}")
    return min(1.0, max(0.0, capacity - n ** (-1.0 / mu)))


def good_set(profile: CodeProfile, policy: str = "all", r0: float | None = None) -> np.ndarray:
    """Indices usable for the secret information set, most reliable first.

    ``policy="all"`` returns every index (noiseless transport);
    ``policy="r0"`` keeps the ``floor(n R0)`` most reliable ones.  ``r0``
    overrides the profile's cutoff rate.
    """
    policy = policy.lower()
    if policy == "all":
        return profile.pi.map.copy()
    if policy != "r0":
        raise ValueError(f"unknown selection policy {policy!r}")
    rate = profile.r0 if r0 is None else r0
    # guard against n*R0 landing a hair below an integer
    size = int(math.floor(profile.n * rate + 1e-9))
    return profile.pi.map[:size].copy()


def build_code(profile_or_n, info_set, bit_reversed: bool = False) -> PolarCode:
    """Code with information bits on ``info_set`` and zeros elsewhere.

    ``profile_or_n`` is a :class:`CodeProfile` or the block length.  With
    ``bit_reversed`` the generator rows come from ``B_n G_2^{(x)m}``.
    """
    n = profile_or_n.n if isinstance(profile_or_n, CodeProfile) else int(profile_or_n)
    m = _exponent(n)
    info = np.asarray(info_set, dtype=np.int64).reshape(-1)
    if info.size and (info.min() < 0 or info.max() >= n):
        raise ValueError("information indices out of range")
    info = np.sort(info)
    if info.size > 1 and not (np.diff(info) > 0).all():
        raise ValueError("information set contains duplicates")
    mask = np.ones(n, dtype=bool)
    mask[info] = False
    frozen = np.flatnonzero(mask)
    g = kron_power(m, bit_reversed)
    all_cols = np.arange(n)
    gen = submatrix(g, info, all_cols) if info.size else BitMatrix.zeros(0, n)
    frozen_gen = submatrix(g, frozen, all_cols) if frozen.size else BitMatrix.zeros(0, n)
    for arr in (info, frozen, mask):
        arr.flags.writeable = False
    return PolarCode(
        n=n,
        k=int(info.size),
        info_set=info,
        frozen_set=frozen,
        gen=gen,
        frozen_gen=frozen_gen,
        bit_reversed=bit_reversed,
        frozen_mask=mask,
    )


def build_parity_check(code: PolarCode) -> BitMatrix:
    """``n x (n-k)`` matrix ``H`` with ``x H = 0`` for zero-frozen codewords.

    These are the columns of ``G_n`` at the frozen indices; it works because
    ``G_n`` is its own inverse.
    """
    g = kron_power(_exponent(code.n), code.bit_reversed)
    if code.frozen_set.size == 0:
        return BitMatrix.zeros(code.n, 0)
    return submatrix(g, np.arange(code.n), code.frozen_set)


def polar_transform(u: np.ndarray) -> np.ndarray:
    """``u G_2^{(x)m}`` along the last axis, in O(n log n) XORs."""
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    _exponent(n)
    lead = x.shape[:-1]
    half = 1
    while half < n:
        view = x.reshape(*lead, n // (2 * half), 2, half)
        view[..., 0, :] ^= view[..., 1, :]
        half *= 2
    return x


def _bitrev_map(code: PolarCode) -> np.ndarray | None:
    return bit_reversal_perm(code.n).map if code.bit_reversed else None


def encode(code: PolarCode, u_info: BitVector, u_frozen: BitVector | None = None) -> BitVector:
    if len(u_info) != code.k:
        raise ValueError(f"expected {code.k} information bits, got {len(u_info)}")
    u = np.zeros(code.n, dtype=np.uint8)
    u[code.info_set] = u_info.bits
    if u_frozen is not None:
        if len(u_frozen) != code.n - code.k:
            raise ValueError(f"expected {code.n - code.k} frozen bits, got {len(u_frozen)}")
        u[code.frozen_set] = u_frozen.bits
    x = polar_transform(u)
    rev = _bitrev_map(code)
    # B_n commutes with the Kronecker power, so it can act on the output
    return BitVector.from_bits(x if rev is None else x[rev])


def _f_minsum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.copysign(1.0, a) * np.copysign(1.0, b) * np.minimum(np.abs(a), np.abs(b))


def _f_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    prod = np.tanh(a / 2) * np.tanh(b / 2)
    with np.errstate(divide="ignore"):
        out = 2 * np.arctanh(prod)
    cap = np.minimum(np.abs(a), np.abs(b))
    return np.clip(out, -cap, cap)


def _sc(llr, frozen, fvals, f, dec_llr, offset):
    width = llr.shape[1]
    if frozen.all():
        u = np.broadcast_to(fvals, llr.shape).astype(np.uint8)
        if dec_llr is not None:
            dec_llr[:, offset : offset + width] = llr if width == 1 else np.nan
        return u, polar_transform(u)
    if width == 1:
        if dec_llr is not None:
            dec_llr[:, offset] = llr[:, 0]
        u = (llr < 0).astype(np.uint8)
        return u, u
    h = width // 2
    a, b = llr[:, :h], llr[:, h:]
    u1, v1 = _sc(f(a, b), frozen[:h], fvals[:h], f, dec_llr, offset)
    l2 = b + (1.0 - 2.0 * v1) * a
    u2, v2 = _sc(l2, frozen[h:], fvals[h:], f, dec_llr, offset + h)
    return np.hstack([u1, u2]), np.hstack([v1 ^ v2, v2])


def sc_decode_batch(
    code: PolarCode,
    llr: np.ndarray,
    frozen_values: np.ndarray | None = None,
    check_node: str = "minsum",
    return_llr: bool = False,
):
    """SC-decode a ``(batch, n)`` array of channel LLRs.

    Positive LLR favours bit 0; an LLR of exactly zero decides 0.  Returns
    ``(u_hat, x_hat)`` as ``uint8`` arrays, plus the per-bit decision LLRs
    when ``return_llr`` is set (NaN inside pruned all-frozen blocks).
    """
    llr = np.asarray(llr, dtype=np.float64)
    if llr.ndim != 2 or llr.shape[1] != code.n:
        raise ValueError(f"expected LLRs of shape (batch, {code.n}), got {llr.shape}")
    if np.isnan(llr).any():
        raise ValueError("LLRs must not be NaN")
    if check_node == "minsum":
        f = _f_minsum
    elif check_node == "exact":
        f = _f_exact
    else:
        raise ValueError(f"unknown check-node rule {check_node!r}")
    fvals = np.zeros(code.n, dtype=np.uint8)
    if frozen_values is not None:
        fv = np.asarray(frozen_values, dtype=np.uint8).reshape(-1)
        if fv.size != code.n - code.k:
            raise ValueError(f"expected {code.n - code.k} frozen values, got {fv.size}")
        fvals[code.frozen_set] = fv
    llr = np.clip(llr, -LLR_CLIP, LLR_CLIP)
    rev = _bitrev_map(code)
    if rev is not None:
        llr = llr[:, rev]
    dec_llr = np.empty(llr.shape) if return_llr else None
    u, x = _sc(llr, code.frozen_mask, fvals, f, dec_llr, 0)
    if rev is not None:
        x = x[:, rev]
    if return_llr:
        return u, x, dec_llr
    return u, x


def sc_decode(
    code: PolarCode,
    llr,
    frozen_values: BitVector | None = None,
    check_node: str = "minsum",
) -> BitVector:
    """Estimate the full encoder input ``u`` (length ``n``) from channel LLRs."""
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got shape {llr.shape}")
    fv = None if frozen_values is None else frozen_values.bits
    u, _ = sc_decode_batch(code, llr[None, :], fv, check_node)
    return BitVector.from_bits(u[0])


def llr_from_hard(word, model: ChannelSpec) -> np.ndarray:
    """Channel LLRs of a hard-decision word seen through a BSC."""
    if model.kind != "BSC":
        raise ValueError("hard words carry no erasure marks; use a BSC model")
    bits = word.bits if isinstance(word, BitVector) else np.asarray(word, dtype=np.uint8)
    mag = math.log((1 - model.param) / model.param)
    return mag * (1.0 - 2.0 * bits.astype(np.float64))


def llr_from_erasures(word, erased) -> np.ndarray:
    """BEC output LLRs: +-inf for received bits, 0 where ``erased`` is set."""
    bits = word.bits if isinstance(word, BitVector) else np.asarray(word, dtype=np.uint8)
    llr = np.where(bits.astype(bool), -np.inf, np.inf)
    return np.where(np.asarray(erased, dtype=bool), 0.0, llr)
