"""scikit-learn style wrappers.

Both classes follow the estimator contract: hyper-parameters are stored
verbatim in ``__init__``, ``fit`` derives the learned state (trailing
underscore), and rows of ``X`` are independent samples.  That lets them sit
in a ``Pipeline`` or be cloned with ``sklearn.base.clone``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .polar import ChannelSpec, bhattacharyya_profile, build_code, llr_from_hard, polar_transform, sc_decode_batch
from .scheme import (
    DecodeFailure,
    SystemParams,
    decrypt_batch,
    encode_message_bits,
    keygen,
    sample_errors,
)
from .validation import check_bits, check_block_length, check_llr, check_weight


class PolarCodec(BaseEstimator, TransformerMixin):
    """Polar encoder/SC decoder on the ``k`` most reliable bit channels.

    Parameters
    ----------
    n : int
        Block length, a power of two.
    k : int
        Number of information bits.
    design_eps : float
        Erasure probability of the design BEC used to rank bit channels.
    check_node : {"minsum", "exact"}
        Check-node rule of the SC decoder.
    decode_p : float
        BSC crossover used to turn hard words into LLRs in
        ``inverse_transform``.
    """

    def __init__(self, n=1024, k=512, design_eps=0.5, check_node="minsum", decode_p=0.05):
        self.n = n
        self.k = k
        self.design_eps = design_eps
        self.check_node = check_node
        self.decode_p = decode_p

    def fit(self, X=None, y=None):
        check_block_length(self.n)
        if not 0 <= self.k <= self.n:
            raise ValueError(f"k must lie in [0, n], got {self.k}")
        self.profile_ = bhattacharyya_profile(self.n, self.design_eps)
        self.code_ = build_code(self.profile_, self.profile_.pi.map[: self.k])
        self.info_set_ = self.code_.info_set
        return self

    def transform(self, X):
        """Encode rows of information bits into codewords."""
        check_is_fitted(self, "code_")
        U = check_bits(X, self.k)
        full = np.zeros((U.shape[0], self.n), dtype=np.uint8)
        full[:, self.info_set_] = U
        return polar_transform(full)

    def decode(self, llr):
        """SC-decode rows of channel LLRs into information bits."""
        check_is_fitted(self, "code_")
        L = check_llr(llr, self.n)
        u_hat, _ = sc_decode_batch(self.code_, L, check_node=self.check_node)
        return u_hat[:, self.info_set_]

    def inverse_transform(self, X):
        """Decode hard-decision words seen through BSC(``decode_p``)."""
        Y = check_bits(X, self.n)
        return self.decode(llr_from_hard(Y, ChannelSpec.bsc(self.decode_p)))


class PKCPCEncryptor(BaseEstimator, TransformerMixin):
    """Key pair as a fitted transformer: ``transform`` encrypts message rows,
    ``inverse_transform`` decrypts ciphertext rows.

    ``weight`` is the Hamming weight of the fresh error added to every
    ciphertext (``None`` means ``t``).  ``fit`` draws the keys from
    ``random_state``; later encryptions keep drawing from the same stream.
    """

    def __init__(
        self,
        m=10,
        k=768,
        design_eps=0.01,
        policy="all",
        t=None,
        decode_p=None,
        weight=None,
        random_state=None,
    ):
        self.m = m
        self.k = k
        self.design_eps = design_eps
        self.policy = policy
        self.t = t
        self.decode_p = decode_p
        self.weight = weight
        self.random_state = random_state

    def fit(self, X=None, y=None):
        params = SystemParams(
            m=self.m,
            k=self.k,
            design_eps=self.design_eps,
            selection_policy=self.policy,
            t=self.t,
            decode_p=self.decode_p,
        )
        self._rng = np.random.default_rng(self.random_state)
        self.params_ = params
        self.public_key_, self.private_key_ = keygen(params, self._rng)
        self.weight_ = params.t if self.weight is None else check_weight(self.weight, params.t)
        return self

    def transform(self, X):
        check_is_fitted(self, "public_key_")
        M = check_bits(X, self.params_.k)
        words = encode_message_bits(self.public_key_, M)
        return words ^ sample_errors(self.params_.n, self.weight_, M.shape[0], self._rng)

    def inverse_transform(self, X):
        check_is_fitted(self, "private_key_")
        C = check_bits(X, self.params_.n)
        msgs, ok = decrypt_batch(self.private_key_, C)
        if not ok.all():
            bad = np.flatnonzero(~ok)
            raise DecodeFailure(f"decryption failed for rows {bad.tolist()}", blocks=bad)
        return msgs
