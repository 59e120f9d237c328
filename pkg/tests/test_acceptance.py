"""Acceptance criteria, each checked at its stated tolerance.

Every test prints a single ``[PASS]``/``[FAIL]`` line (visible with
``pytest -v``) before asserting.
"""

import math
import statistics
import time

import numpy as np
import pytest

from pkcpc.gf2 import BitMatrix, BitVector, gauss_jordan, kron_power, submatrix
from pkcpc.polar import bhattacharyya_profile, build_code, llr_from_erasures, polar_transform, sc_decode_batch
from pkcpc.scheme import SystemParams, decrypt, decrypt_batch, encode_message_bits, encrypt, keygen, serialize_public
from pkcpc.security import (
    TABLE_III,
    TABLE_IV,
    SternParams,
    key_sizes,
    log2_binomial,
    optimize_stern,
    stern_search,
    stern_workfactor,
)
from pkcpc.simulation import simulate_failure_rates


@pytest.fixture
def report(capsys):
    def _report(label, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, detail

    return _report


def test_criterion_01_workfactor_rows(report):
    deltas = []
    for n, k, t, p, ell, published, _ in TABLE_III:
        deltas.append(stern_workfactor(n, k, t, SternParams(p, ell)) - published)
    worst = max(abs(d) for d in deltas)
    report("criterion 1 work factor, Table III rows", worst <= 0.2, f"max |delta| = {worst:.4f} (tol 0.2)")


def test_criterion_02_rate_sweep(report):
    wf_err = nc_err = 0.0
    for _, k, p, ell, wf_pub, nc_pub, _ in TABLE_IV:
        wf_err = max(wf_err, abs(stern_workfactor(1024, k, 63, SternParams(p, ell)) - wf_pub))
        nc_err = max(nc_err, abs(log2_binomial(1024, k) - nc_pub))
        optimize_stern(1024, k, 63)
    ok = wf_err <= 0.2 and nc_err <= 0.02
    report(
        "criterion 2 rate sweep, Table IV rows",
        ok,
        f"max |WF delta| = {wf_err:.4f} (tol 0.2), max |N_c delta| = {nc_err:.4f} (tol 0.02)",
    )


def test_criterion_03_key_sizes(report):
    pub_768, _ = key_sizes(1024, 768)
    pub_921, _ = key_sizes(1024, 921)
    pk, _ = keygen(SystemParams(m=10, k=768), np.random.default_rng(0))
    payload = len(serialize_public(pk)) - 12
    ok = pub_768 == 24576 and abs(pub_921 / 1024 - 11.58) < 0.005 and payload == 768 * 256 // 8
    report(
        "criterion 3 key sizes",
        ok,
        f"(1024,768) {pub_768:g} B, (1024,921) {pub_921 / 1024:.3f} KiB, serialized payload {payload} B",
    )


def test_criterion_04_counting(report):
    a = log2_binomial(256, 192)
    b = log2_binomial(1024, 768)
    ok = 203.5 <= a <= 204.5 and abs(b - 825.63) <= 0.02
    report("criterion 4 counting", ok, f"log2 C(256,192) = {a:.3f}, log2 C(1024,768) = {b:.3f}")


def test_criterion_05_roundtrip(report):
    failures = {}
    start = time.perf_counter()
    for m in (4, 6, 8, 10):
        n = 1 << m
        params = SystemParams(m=m, k=3 * n // 4)
        bad = 0
        for seed in range(1000):
            rng = np.random.default_rng([m, seed])
            pk, sk = keygen(params, rng)
            msg = BitVector.from_bits(rng.integers(0, 2, pk.k))
            c = encrypt(pk, msg, BitVector.zeros(n))
            bad += decrypt(sk, c) != msg
        failures[n] = bad
    elapsed = time.perf_counter() - start
    ok = not any(failures.values()) and elapsed < 120
    report("criterion 5 noise-free roundtrip", ok, f"failures per n {failures}, {elapsed:.1f} s (limit 120 s)")


def test_criterion_06_toy_key(report):
    pk, sk = keygen(SystemParams(m=2, k=2), info_set=[2, 3], tail_order=[0, 1])
    c = encrypt(pk, BitVector.from_bits([1, 1]), BitVector.zeros(4))
    m = decrypt(sk, c)
    ok = (
        sk.scrambler.bits.tolist() == [[1, 0], [1, 1]]
        and pk.q.bits.tolist() == [[1, 0], [0, 1]]
        and c.body.bits.tolist() == [1, 1, 1, 1]
        and m.bits.tolist() == [1, 1]
    )
    report("criterion 6 toy key", ok, f"S = {sk.scrambler.bits.tolist()}, Q = {pk.q.bits.tolist()}, c = {c.body.bits.tolist()}, m = {m.bits.tolist()}")


def _bec_bler(code, eps, trials, rng):
    msgs = rng.integers(0, 2, (trials, code.k), dtype=np.uint8)
    u = np.zeros((trials, code.n), dtype=np.uint8)
    u[:, code.info_set] = msgs
    x = polar_transform(u)
    erased = rng.random(x.shape) < eps
    u_hat, _, dec = sc_decode_batch(code, llr_from_erasures(x, erased), return_llr=True)
    wrong = (u_hat[:, code.info_set] != msgs).any(axis=1)
    guessed = (dec[:, code.info_set] == 0).any(axis=1)
    return float((wrong | guessed).mean())


def _union_gate(k, trials, seed, block_order=False):
    prof = bhattacharyya_profile(1024, 0.5, block_order=block_order)
    chosen = prof.pi.map[:k]
    bound = float(prof.z[chosen].sum())
    code = build_code(1024, chosen)
    bler = _bec_bler(code, 0.5, trials, np.random.default_rng(seed))
    b = min(bound, 1.0)
    sigma = math.sqrt(b * (1 - b) / trials)
    return bler, bound, sigma


def test_criterion_07_union_bound(report):
    bler, bound, sigma = _union_gate(512, 2000, 7)
    ok = bler <= bound + 3 * sigma
    report(
        "criterion 7 SC union bound, BEC(0.5) n=1024 k=512",
        ok,
        f"BLER {bler:.4f} over 2000 trials, bound {bound:.3f} (exceeds 1, so this gate is loose)",
    )


def test_criterion_07_union_bound_informative_rate(report):
    bler, bound, sigma = _union_gate(384, 4000, 8)
    wrong_bler, wrong_bound, _ = _union_gate(384, 500, 9, block_order=True)
    ok = bler <= bound + 3 * sigma and wrong_bler > wrong_bound + 0.5
    report(
        "criterion 7 (informative gate) n=1024 k=384",
        ok,
        f"BLER {bler:.4f} <= bound {bound:.4f} + 3 sigma; block-order labelling gives BLER {wrong_bler:.3f} "
        f"against its claimed {wrong_bound:.4f}",
    )


def test_criterion_08_failure_curve(report):
    params = SystemParams(m=8, k=192, selection_policy="r0")
    points = simulate_failure_rates(params, range(0, params.t + 1), trials=1000, keys=10, seed=8)
    rates = np.array([pt.rate for pt in points])
    trials = points[0].trials
    # any later weight may fall below an earlier one only within sampling noise
    worst = 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            pi, pj = rates[i], rates[j]
            sd = math.sqrt((pi * (1 - pi) + pj * (1 - pj)) / trials)
            worst = max(worst, (pi - pj) / sd if sd else (math.inf if pi > pj else 0.0))
    intervals = all(pt.ci_low <= pt.rate <= pt.ci_high for pt in points)
    ok = points[0].failures == 0 and worst <= 3.0 and intervals
    summary = ", ".join(f"w={pt.weight}:{pt.rate:.3f}" for pt in points[:10])
    report(
        "criterion 8 failure rate vs weight (256,192) R0 keys",
        ok,
        f"w=0 failures {points[0].failures}, largest decrease {worst:.2f} sigma (limit 3), {summary}, ...",
    )


def _planted_instance(rng, n=64, k=32, w=6):
    while True:
        gen = rng.integers(0, 2, (k, n), dtype=np.uint8)
        word = np.zeros(n, dtype=np.uint8)
        word[rng.choice(n, w, replace=False)] = 1
        gen[0] = word
        mix = rng.integers(0, 2, (k, k), dtype=np.uint8)
        np.fill_diagonal(mix, 1)
        mix = np.tril(mix)
        gen = (mix.astype(np.int64) @ gen % 2).astype(np.uint8)
        if len(gauss_jordan(gen)[1]) == k:
            return gen


def test_criterion_09_stern_search(report):
    params = SternParams(1, 4)
    found = verified = 0
    start = time.perf_counter()
    for seed in range(100):
        rng = np.random.default_rng(seed)
        gen = _planted_instance(rng)
        try:
            word = stern_search(BitMatrix.from_bits(gen), 6, params, rng, max_iters=100_000)
        except LookupError:
            continue
        found += 1
        member = len(gauss_jordan(np.vstack([gen, word.bits]))[1]) == gen.shape[0]
        verified += member and 0 < word.weight <= 6
    elapsed = time.perf_counter() - start
    ok = found >= 95 and verified == found and elapsed < 300
    report("criterion 9 Stern search (64,32) planted weight 6", ok, f"found {found}/100, verified {verified}, {elapsed:.1f} s")


def _median_decode_time(n, reps=100):
    prof = bhattacharyya_profile(n, 0.5)
    code = build_code(prof, prof.pi.map[: n // 2])
    rng = np.random.default_rng(n)
    llrs = rng.normal(2.0, 2.0, (reps, 1, n))
    sc_decode_batch(code, llrs[0])
    times = []
    for llr in llrs:
        t0 = time.perf_counter()
        sc_decode_batch(code, llr)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def test_criterion_10_decode_scaling(report):
    t_small = _median_decode_time(1024)
    t_large = _median_decode_time(4096)
    ratio = t_large / t_small
    report(
        "criterion 10 SC decode scaling",
        ratio < 8,
        f"median {t_small * 1e3:.2f} ms (n=1024), {t_large * 1e3:.2f} ms (n=4096), ratio {ratio:.2f} (limit 8)",
    )


def test_criterion_11_scrambler_invertible(report):
    singular = {}
    for m in (4, 6, 8, 10):
        n = 1 << m
        g = kron_power(m)
        rng = np.random.default_rng(m)
        bad = 0
        for _ in range(1000):
            a = np.sort(rng.choice(n, 3 * n // 4, replace=False))
            _, pivots = gauss_jordan(submatrix(g, a, a).bits)
            bad += len(pivots) < a.size
        singular[n] = bad
    report("criterion 11 scrambler invertibility", not any(singular.values()), f"singular draws per n {singular}")


def test_criterion_05_batch_consistency():
    """The batched decryptor used by the CLI agrees with the scalar one."""
    pk, sk = keygen(SystemParams(m=10, k=768), np.random.default_rng(1))
    msgs = np.random.default_rng(2).integers(0, 2, (64, 768), dtype=np.uint8)
    out, ok = decrypt_batch(sk, encode_message_bits(pk, msgs))
    assert ok.all() and np.array_equal(out, msgs)
