"""Work-factor, key-size and code-counting estimates, plus a small Stern search.

Every count is handled as a base-2 logarithm so that parameters up to
n = 2**20 never overflow.  The information-set-decoding model is Stern's
original algorithm with the per-iteration cost

    1/2 (n-k)^2 (n+k) + 2 C(k/2, p) p l + 2 p (n-k) C(k/2, p)^2 / 2^l

and success probability C(k/2, p)^2 C(n-k-l, w-2p) / C(n, w).  For odd k
the information set splits into floor(k/2) and ceil(k/2) halves.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import gammaln

from .gf2 import BitMatrix, BitVector, gauss_jordan

__all__ = [
    "SternParams",
    "SecurityReport",
    "CodewordNotFound",
    "log2_binomial",
    "stern_workfactor",
    "stern_success_log2",
    "permutation_count_factorial",
    "optimize_stern",
    "count_equivalents",
    "key_sizes",
    "message_recovery_wf",
    "security_report",
    "stern_search",
    "stern_iteration",
    "TABLE_I",
    "TABLE_II",
    "TABLE_III",
    "TABLE_IV",
]

_LN2 = math.log(2.0)
# below this the exact-integer route is cheap and exact to double precision
_EXACT_LIMIT = 4096


class CodewordNotFound(LookupError):
    """Stern search exhausted its iteration budget without a hit."""


@dataclass(frozen=True)
class SternParams:
    p: int
    ell: int

    def check(self, n: int, k: int, w: int) -> None:
        if not 0 <= self.p <= w:
            raise ValueError(f"p must lie in [0, {w}], got {self.p}")
        if not 0 <= self.ell <= n - k:
            raise ValueError(f"ell must lie in [0, {n - k}], got {self.ell}")
        if 2 * self.p > w or n - k - self.ell < w - 2 * self.p:
            raise ValueError(f"infeasible Stern parameters {self} for (n={n}, k={k}, w={w})")
        if self.p > k // 2:
            raise ValueError(f"p = {self.p} exceeds the half information set {k // 2}")


@dataclass(frozen=True)
class SecurityReport:
    n: int
    k: int
    w: int
    wf_log2: float
    best: SternParams
    nc_log2: float
    ns_log2: float
    np_log2: float
    np_factorial_log2: float
    m_pub_bytes: float
    m_pri_bits: int

    def as_dict(self) -> dict:
        out = asdict(self)
        out["best"] = {"p": self.best.p, "ell": self.best.ell}
        return out


def log2_binomial(n: int, k: int) -> float:
    """log2 C(n, k)."""
    if k < 0 or n < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    small = min(k, n - k)
    if small == 0:
        return 0.0
    if n <= _EXACT_LIMIT or small <= 64:
        return math.log2(math.comb(n, k))
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) / _LN2


def _log2_binomial_array(n, k) -> np.ndarray:
    """Vectorised log2 C(n, k); -inf where k is out of range."""
    n = np.asarray(n, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    valid = (k >= 0) & (k <= n)
    nn, kk = np.where(valid, n, 0.0), np.where(valid, k, 0.0)
    out = (gammaln(nn + 1) - gammaln(kk + 1) - gammaln(nn - kk + 1)) / _LN2
    return np.where(valid, out, -np.inf)


def _halves(k: int) -> tuple[int, int]:
    return k // 2, k - k // 2


def _log2_or_neg_inf(x: float) -> float:
    return math.log2(x) if x > 0 else -math.inf


def stern_workfactor(n: int, k: int, w: int, params: SternParams) -> float:
    """log2 of Cost/Probability for one Stern parameter choice."""
    params.check(n, k, w)
    p, ell = params.p, params.ell
    h1, h2 = _halves(k)
    b1, b2 = log2_binomial(h1, p), log2_binomial(h2, p)
    elimination = math.log2(0.5 * (n - k) ** 2 * (n + k))
    # 2 C(k/2, p) p l, generalised to C(h1, p) + C(h2, p) for odd k
    lists = _log2_or_neg_inf(p * ell) + np.logaddexp2(b1, b2) if p * ell else -math.inf
    collisions = _log2_or_neg_inf(2 * p * (n - k)) + b1 + b2 - ell if p else -math.inf
    cost = float(np.logaddexp2(np.logaddexp2(elimination, lists), collisions))
    return cost - stern_success_log2(n, k, w, params)


def stern_success_log2(n: int, k: int, w: int, params: SternParams) -> float:
    """log2 of the chance that one iteration exposes a given weight-``w`` word.

    The word must put exactly ``p`` ones in each half of the information
    set and none in the ``l``-column window.
    """
    params.check(n, k, w)
    h1, h2 = _halves(k)
    p, ell = params.p, params.ell
    return (
        log2_binomial(h1, p)
        + log2_binomial(h2, p)
        + log2_binomial(n - k - ell, w - 2 * p)
        - log2_binomial(n, w)
    )


def _workfactor_grid(n: int, k: int, w: int):
    h1, h2 = _halves(k)
    p = np.arange(0, min(w // 2, h1) + 1)[:, None]
    ell = np.arange(0, n - k + 1)[None, :]
    b1 = _log2_binomial_array(h1, p)
    b2 = _log2_binomial_array(h2, p)
    with np.errstate(divide="ignore"):
        elimination = math.log2(0.5 * (n - k) ** 2 * (n + k))
        lists = np.log2(p * ell) + np.logaddexp2(b1, b2)
        collisions = np.log2(2.0 * p * (n - k)) + b1 + b2 - ell
    cost = np.logaddexp2(np.logaddexp2(elimination, lists), collisions)
    success = b1 + b2 + _log2_binomial_array(n - k - ell, w - 2 * p) - log2_binomial(n, w)
    wf = cost - success
    wf[~np.isfinite(success)] = np.inf
    return p[:, 0], ell[0], wf


def optimize_stern(n: int, k: int, w: int) -> tuple[SternParams, float]:
    """Exhaustive (p, l) search; ties go to the smaller p, then smaller l."""
    if not 0 < k < n or not 0 <= w <= n:
        raise ValueError(f"invalid code parameters (n={n}, k={k}, w={w})")
    ps, ells, wf = _workfactor_grid(n, k, w)
    flat = int(np.argmin(wf))  # row-major: first hit has the smallest p, then l
    i, j = divmod(flat, wf.shape[1])
    best = SternParams(int(ps[i]), int(ells[j]))
    return best, stern_workfactor(n, k, w, best)


def count_equivalents(n: int, k: int) -> tuple[float, float, float]:
    """log2 of the equivalent-code, scrambler and permutation counts.

    The permutation count follows the closed form C(n, k) * (n - k).
    """
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    nc = log2_binomial(n, k)
    return nc, nc, nc + math.log2(n - k)


def permutation_count_factorial(n: int, k: int) -> float:
    """log2 of C(n, k) * (n - k)!, counting every arrangement of the tail columns."""
    return log2_binomial(n, k) + math.lgamma(n - k + 1) / _LN2


def key_sizes(n: int, k: int) -> tuple[float, int]:
    """``(public key bytes, private key bit bound)``.

    The public key is the ``k x (n-k)`` block Q; the private bound is
    ``ceil(log2 n) (n-k)`` bits for the frozen set plus ``n (n-k)`` for P.
    """
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    index_bits = max(1, math.ceil(math.log2(n)))
    return k * (n - k) / 8, index_bits * (n - k) + n * (n - k)


def message_recovery_wf(n: int, k: int, t: int) -> float:
    """Decoding-attack work factor: Stern on the code extended by ``c``.

    Returns 0 for ``t = 0``, where the ciphertext is itself a codeword and
    no search is needed.
    """
    if t == 0:
        return 0.0
    return optimize_stern(n, k + 1, t)[1]


def security_report(n: int, k: int, w: int) -> SecurityReport:
    best, wf = optimize_stern(n, k, w)
    nc, ns, np_ = count_equivalents(n, k)
    pub, pri = key_sizes(n, k)
    return SecurityReport(
        n=n,
        k=k,
        w=w,
        wf_log2=wf,
        best=best,
        nc_log2=nc,
        ns_log2=ns,
        np_log2=np_,
        np_factorial_log2=permutation_count_factorial(n, k),
        m_pub_bytes=pub,
        m_pri_bits=pri,
    )


def _subset_sums(rows: list[int], window: list[int], p: int):
    for combo in itertools.combinations(range(len(rows)), p):
        acc = 0
        key = 0
        for i in combo:
            acc ^= rows[i]
            key ^= window[i]
        yield key, acc


def _pack_int(bits: np.ndarray) -> int:
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def stern_iteration(gen: np.ndarray, w: int, params: SternParams, rng) -> list[np.ndarray]:
    """One Stern iteration on a ``k x n`` 0/1 generator array.

    Returns every codeword of weight in ``[1, w]`` turned up by the
    collision step, in the original coordinate order.
    """
    k, n = gen.shape
    perm = rng.permutation(n)
    reduced, pivots = gauss_jordan(gen[:, perm])
    if len(pivots) < k:
        raise ValueError("generator matrix is not full rank")
    pivot_mask = np.zeros(n, dtype=bool)
    pivot_mask[pivots] = True
    redundancy = np.flatnonzero(~pivot_mask)
    window_cols = redundancy[: params.ell]
    rows = [_pack_int(r) for r in reduced]
    window = [_pack_int(r) for r in reduced[:, window_cols]] if params.ell else [0] * k
    h1 = k // 2
    table: dict[int, list[int]] = {}
    for key, acc in _subset_sums(rows[:h1], window[:h1], params.p):
        table.setdefault(key, []).append(acc)
    found = []
    for key, acc in _subset_sums(rows[h1:], window[h1:], params.p):
        for left in table.get(key, ()):
            word = left ^ acc
            weight = word.bit_count()
            if 0 < weight <= w:
                found.append(word)
    out = []
    for word in found:
        bits = np.array([(word >> j) & 1 for j in range(n)], dtype=np.uint8)
        orig = np.empty_like(bits)
        orig[perm] = bits
        out.append(orig)
    return out


def stern_search(gen: BitMatrix, w: int, params: SternParams, rng=None, max_iters: int = 10_000) -> BitVector:
    """Look for a nonzero codeword of weight at most ``w``.

    Raises :class:`CodewordNotFound` once ``max_iters`` iterations pass
    without success; that says nothing about whether such a word exists.
    """
    rng = np.random.default_rng(rng)
    bits = gen.bits
    k, n = bits.shape
    if 2 * params.p > k or params.ell > n - k:
        raise ValueError(f"Stern parameters {params} do not fit a ({n}, {k}) code")
    for _ in range(max_iters):
        hits = stern_iteration(bits, w, params, rng)
        if hits:
            return BitVector.from_bits(min(hits, key=lambda h: int(h.sum())))
    raise CodewordNotFound(f"no codeword of weight <= {w} within {max_iters} iterations")


# Published reference values.  Table I: (n, k) -> (N_c log2, public key, R, t, WF).
TABLE_I = {
    (256, 192): {"nc_log2": 204, "m_pub": "1.5 kbytes", "rate": 0.75, "t": 31, "wf_log2": 79.96},
    (1024, 768): {"nc_log2": 826, "m_pub": "24 kbytes", "rate": 0.75, "t": 63, "wf_log2": 140.63},
    (1024, 921): {"nc_log2": 478, "m_pub": "11.58 kbytes", "rate": 0.9, "t": 63, "wf_log2": 247.98},
}
# Table II: (n, k) -> (N_c, N_s, N_p) as log2.
TABLE_II = {
    (256, 192): (204, 204, 509),
    (256, 230): (118, 118, 206),
    (512, 384): (410, 410, 538),
    (1024, 768): (825, 825, 1081),
    (2048, 1536): (1656, 1656, 2168),
    (4096, 3072): (3317, 3317, None),
}
# Table III: (n, k, t, p, ell, WF log2, public key KiB)
TABLE_III = [
    (256, 192, 31, 2, 8, 79.96, 1.5),
    (512, 384, 44, 3, 22, 104.61, 6),
    (1024, 768, 63, 5, 39, 140.63, 24),
    (2048, 1536, 89, 7, 59, 190.19, 96),
    (4096, 3072, 127, 15, 124, 266.34, 384),
]
# Table IV at n = 1024, t = 63: (R, k, p, ell, WF log2, N_c log2, public key KiB)
TABLE_IV = [
    (0.5, 512, 3, 27, 74.90, 1018.67, 32),
    (0.6, 614, 3, 27, 94.82, 989.19, 30.73),
    (0.7, 717, 3, 27, 122.41, 897.00, 26.87),
    (0.75, 768, 5, 39, 140.63, 825.63, 24),
    (0.8, 819, 9, 61, 163.70, 734.65, 20.49),
    (0.9, 921, 5, 1, 247.98, 477.56, 11.58),
]
