"""Independent brute-force references used to freeze expected values."""

import itertools
import math

import numpy as np


def gf2_rank_rows(rows):
    """Rank of a list of Python-int bit rows."""
    basis = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


def kron_rows(m):
    g = np.array([[1]], dtype=int)
    for _ in range(m):
        g = np.kron(g, np.array([[1, 0], [1, 1]]))
    return g


def bec_bit_channel_erasure(m, eps):
    """Exact erasure probability of every synthesized bit channel.

    u_i is lost given the unerased outputs R and a genie supplying u_{<i}
    iff row i of G, restricted to R, lies in the span of the later rows.
    """
    g = kron_rows(m)
    n = g.shape[0]
    z = np.zeros(n)
    for pattern in range(1 << n):
        kept = [j for j in range(n) if not (pattern >> j) & 1]
        erased = n - len(kept)
        prob = eps**erased * (1 - eps) ** (n - erased)
        rows = [int("".join(str(g[i, j]) for j in kept) or "0", 2) for i in range(n)]
        for i in range(n):
            later = rows[i + 1 :]
            if gf2_rank_rows(later + [rows[i]]) == gf2_rank_rows(later):
                z[i] += prob
    return z


def bsc_bit_llrs(channel_llr, u_prefix_fn):
    """Exact SC decision LLRs for a rate-1 code by enumerating all inputs.

    ``u_prefix_fn(i)`` returns the already-decided bits u_0..u_{i-1}.
    """
    n = len(channel_llr)
    m = int(math.log2(n))
    g = kron_rows(m)
    out = np.zeros(n)
    # log P(y | x_j) up to a constant: -llr_j * x_j / 2 splits symmetrically
    for i in range(n):
        prefix = list(u_prefix_fn(i))
        acc = {0: [], 1: []}
        for tail in itertools.product((0, 1), repeat=n - i - 1):
            for ui in (0, 1):
                u = np.array(prefix + [ui] + list(tail))
                x = u @ g % 2
                acc[ui].append(float(np.sum(np.where(x == 1, -channel_llr / 2, channel_llr / 2))))
        l0 = np.logaddexp.reduce(acc[0])
        l1 = np.logaddexp.reduce(acc[1])
        out[i] = l0 - l1
    return out


def ml_decode(gen, word, erased):
    """All codewords consistent with the unerased positions."""
    k, n = gen.shape
    hits = []
    for msg in itertools.product((0, 1), repeat=k):
        x = np.array(msg) @ gen % 2
        if all(x[j] == word[j] for j in range(n) if not erased[j]):
            hits.append((np.array(msg), x))
    return hits


def exact_bec_profile(m, eps):
    """Natural-order Bhattacharyya parameters as exact fractions."""
    z = [eps]
    for _ in range(m):
        z = [v for a in z for v in (2 * a - a * a, a * a)]
    return z


def log_fraction(q):
    return math.log(q.numerator) - math.log(q.denominator)
