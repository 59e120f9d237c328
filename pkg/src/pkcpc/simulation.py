"""Monte-Carlo decryption failure rates versus intentional error weight."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from .scheme import SystemParams, decrypt_batch, encode_message_bits, keygen, sample_errors


@dataclass(frozen=True)
class FailurePoint:
    weight: int
    trials: int
    failures: int
    flagged: int
    ci_low: float
    ci_high: float

    @property
    def rate(self) -> float:
        return self.failures / self.trials


def _stream(entropy: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=key))


def simulate_failure_rates(
    params: SystemParams,
    weights,
    trials: int,
    keys: int = 10,
    seed: int | None = None,
    confidence: float = 0.95,
) -> list[FailurePoint]:
    """Encrypt/decrypt random messages at each weight and count failures.

    ``trials`` messages per weight are spread over ``keys`` independent
    key pairs.  Every (key, weight) pair draws from its own stream derived
    from ``seed``, so results do not depend on evaluation order.  A trial
    fails when the recovered message is wrong or the decoder rejects it;
    ``flagged`` counts the rejections alone.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if keys < 1:
        raise ValueError("keys must be at least 1")
    entropy = np.random.SeedSequence(seed).entropy
    pairs = [keygen(params, _stream(entropy, j)) for j in range(min(keys, trials))]
    shares = np.diff(np.linspace(0, trials, len(pairs) + 1).round().astype(int))
    points = []
    for w in weights:
        failures = flagged = 0
        for j, ((pk, sk), count) in enumerate(zip(pairs, shares)):
            if count == 0:
                continue
            rng = _stream(entropy, j, int(w) + 1)
            msgs = rng.integers(0, 2, size=(count, pk.k), dtype=np.uint8)
            bodies = encode_message_bits(pk, msgs) ^ sample_errors(pk.n, int(w), count, rng)
            out, ok = decrypt_batch(sk, bodies)
            wrong = (out != msgs).any(axis=1) | ~ok
            failures += int(wrong.sum())
            flagged += int((~ok).sum())
        ci = binomtest(failures, trials).proportion_ci(confidence_level=confidence, method="wilson")
        points.append(FailurePoint(int(w), trials, failures, flagged, float(ci.low), float(ci.high)))
    return points
