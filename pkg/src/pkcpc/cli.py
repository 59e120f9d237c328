"""Command-line front end.

    pkcpc keygen   -m 10 -k 768 --seed 7
    pkcpc encrypt  --public pkcpc.pub -i plain.bin -o cipher.bin -w 0
    pkcpc decrypt  --private pkcpc.key -i cipher.bin -o plain.out
    pkcpc profile  -m 2 --eps 0.5
    pkcpc simulate -m 8 -k 192 --policy r0 --trials 1000
    pkcpc tables
    pkcpc estimate -m 10 -k 768 -w 63

Exit status is 0 on success, 1 on a runtime failure (bad key file,
decode failure, I/O) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import struct
import sys
import tempfile

import numpy as np

from .polar import bhattacharyya_profile, good_set
from .report import format_text, table_rows
from .scheme import (
    DecodeFailure,
    KeyFormatError,
    SystemParams,
    decrypt_batch,
    deserialize_private,
    deserialize_public,
    encode_message_bits,
    keygen,
    max_error_weight,
    sample_errors,
    serialize_private,
    serialize_public,
)
from .security import key_sizes, security_report
from .simulation import simulate_failure_rates

SEED_ENV = "PKCPC_SEED"
LENGTH_PREFIX = struct.Struct("<Q")
ENCRYPT_CHUNK = 4096
DECRYPT_CHUNK = 1024


class CliError(Exception):
    """Runtime failure reported on stderr with exit status 1."""


# --------------------------------------------------------------------- io


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc


def _write_atomic(path: str, data: bytes) -> None:
    """Write to a temporary sibling, then rename over ``path``."""
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".pkcpc-", suffix=".tmp")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from exc
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise CliError(f"cannot write {path}: {exc.strerror}") from exc


def _fingerprint(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _emit(args, record: dict, text: str) -> None:
    if args.format == "structured":
        print(json.dumps(record, sort_keys=True))
    else:
        print(text)


# ------------------------------------------------------------- framing


def frame_plaintext(data: bytes, k: int) -> np.ndarray:
    """Length-prefixed plaintext as a ``(blocks, k)`` bit array, zero padded."""
    raw = np.frombuffer(LENGTH_PREFIX.pack(len(data)) + data, dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")
    blocks = -(-bits.size // k)
    out = np.zeros(blocks * k, dtype=np.uint8)
    out[: bits.size] = bits
    return out.reshape(blocks, k)


def unframe_plaintext(blocks: np.ndarray) -> bytes:
    bits = blocks.reshape(-1)
    usable = bits[: bits.size - bits.size % 8]
    raw = np.packbits(usable, bitorder="little").tobytes()
    if len(raw) < LENGTH_PREFIX.size:
        raise CliError("decrypted stream is shorter than its length prefix")
    (length,) = LENGTH_PREFIX.unpack_from(raw)
    if length > len(raw) - LENGTH_PREFIX.size:
        raise CliError(f"length prefix {length} exceeds the decrypted payload")
    return raw[LENGTH_PREFIX.size : LENGTH_PREFIX.size + length]


def _block_bytes(n: int) -> int:
    return (n + 7) // 8


# ------------------------------------------------------------ commands


def _params(args, parser) -> SystemParams:
    try:
        return SystemParams(
            m=args.m,
            k=args.k,
            design_eps=args.eps,
            selection_policy=args.policy,
            t=args.t,
            decode_p=args.decode_p,
            seed=args.seed,
        )
    except ValueError as exc:
        parser.error(str(exc))


def cmd_keygen(args, parser) -> int:
    params = _params(args, parser)
    pk, sk = keygen(params, np.random.default_rng(args.seed))
    pub_raw, pri_raw = serialize_public(pk), serialize_private(sk)
    _write_atomic(args.public, pub_raw)
    _write_atomic(args.private, pri_raw)
    m_pub, m_pri = key_sizes(params.n, params.k)
    payload = pk.k * ((pk.n - pk.k + 7) // 8)
    record = {
        "record": "keygen",
        "n": params.n,
        "k": params.k,
        "t": params.t,
        "policy": params.selection_policy,
        "public_path": args.public,
        "public_bytes": len(pub_raw),
        "public_sha256": _fingerprint(pub_raw),
        "q_payload_bytes": payload,
        "private_path": args.private,
        "private_bytes": len(pri_raw),
        "private_sha256": _fingerprint(pri_raw),
        "m_pub_bytes": m_pub,
        "m_pri_bits": m_pri,
    }
    text = "\n".join(
        [
            f"(n, k, t) = ({params.n}, {params.k}, {params.t}), policy {params.selection_policy}",
            f"public key  {args.public}: {len(pub_raw)} bytes, Q payload {payload} bytes",
            f"  sha256 {record['public_sha256']}",
            f"private key {args.private}: {len(pri_raw)} bytes",
            f"  sha256 {record['private_sha256']}",
            f"theoretical sizes: m_pub = {m_pub:g} bytes, m_pri = {m_pri} bits",
        ]
    )
    _emit(args, record, text)
    return 0


def _load(path: str, loader, **kw):
    try:
        return loader(_read(path), **kw)
    except KeyFormatError as exc:
        raise CliError(f"{path}: {exc}") from exc


def cmd_encrypt(args, parser) -> int:
    pk = _load(args.public, deserialize_public)
    if args.w < 0 or args.w > pk.t:
        parser.error(f"error weight {args.w} must lie in [0, t = {pk.t}]")
    data = _read(args.input)
    rng = np.random.default_rng(args.seed)
    blocks = frame_plaintext(data, pk.k)
    out = []
    for start in range(0, blocks.shape[0], ENCRYPT_CHUNK):
        chunk = blocks[start : start + ENCRYPT_CHUNK]
        body = encode_message_bits(pk, chunk) ^ sample_errors(pk.n, args.w, chunk.shape[0], rng)
        out.append(np.packbits(body, axis=1, bitorder="little").tobytes())
    cipher = b"".join(out)
    _write_atomic(args.output, cipher)
    record = {
        "record": "encrypt",
        "blocks": int(blocks.shape[0]),
        "plaintext_bytes": len(data),
        "ciphertext_bytes": len(cipher),
        "w": args.w,
    }
    text = f"encrypted {len(data)} bytes into {blocks.shape[0]} blocks ({len(cipher)} bytes), w = {args.w}"
    if args.output != "-":
        _emit(args, record, text)
    return 0


def cmd_decrypt(args, parser) -> int:
    overrides = {}
    if args.t is not None:
        overrides["t"] = args.t
    if args.decode_p is not None:
        overrides["decode_p"] = args.decode_p
    try:
        sk = _load(args.private, deserialize_private, **overrides)
    except ValueError as exc:
        parser.error(str(exc))
    n, k = sk.params.n, sk.params.k
    raw = _read(args.input)
    width = _block_bytes(n)
    if len(raw) % width or not raw:
        raise CliError(f"ciphertext length {len(raw)} is not a positive multiple of {width} bytes")
    packed = np.frombuffer(raw, dtype=np.uint8).reshape(-1, width)
    bodies = np.unpackbits(packed, axis=1, count=n, bitorder="little")
    msgs = np.empty((bodies.shape[0], k), dtype=np.uint8)
    for start in range(0, bodies.shape[0], DECRYPT_CHUNK):
        out, ok = decrypt_batch(sk, bodies[start : start + DECRYPT_CHUNK])
        if not ok.all():
            bad = start + int(np.flatnonzero(~ok)[0])
            raise CliError(f"decode failure at block {bad}")
        msgs[start : start + out.shape[0]] = out
    plain = unframe_plaintext(msgs)
    _write_atomic(args.output, plain)
    record = {"record": "decrypt", "blocks": int(bodies.shape[0]), "plaintext_bytes": len(plain)}
    if args.output != "-":
        _emit(args, record, f"decrypted {bodies.shape[0]} blocks into {len(plain)} bytes")
    return 0


def cmd_profile(args, parser) -> int:
    if not 0.0 < args.eps < 1.0:
        parser.error(f"--eps must lie in (0, 1), got {args.eps}")
    if not 0 <= args.m <= 14:
        parser.error(f"-m must lie in [0, 14], got {args.m}")
    profile = bhattacharyya_profile(1 << args.m, args.eps, block_order=args.block_order)
    ranks = profile.rank
    structured = args.format == "structured"
    lines = []
    for i, z in enumerate(profile.z):
        if structured:
            lines.append(json.dumps({"record": "channel", "i": i, "z": float(z), "rank": int(ranks[i])}))
        else:
            lines.append(f"{i:6d}  {z:.10g}  {ranks[i]:6d}")
    r0 = float(profile.r0)
    good = int(len(good_set(profile, "r0")))
    if structured:
        lines.append(json.dumps({"record": "cutoff", "n": profile.n, "eps": args.eps, "r0": r0, "r0_good": good}))
    else:
        lines.append(f"R0 = {r0:.6f}  ({good} channels at rate R0)")
    print("\n".join(lines))
    return 0


def cmd_simulate(args, parser) -> int:
    if args.trials < 1:
        parser.error("--trials must be at least 1")
    if args.keys < 1:
        parser.error("--keys must be at least 1")
    params = _params(args, parser)
    w_max = params.t if args.w_max is None else args.w_max
    if not 0 <= w_max <= params.n:
        parser.error(f"--w-max must lie in [0, {params.n}]")
    if args.w_step < 1:
        parser.error("--w-step must be at least 1")
    points = simulate_failure_rates(
        params, range(0, w_max + 1, args.w_step), args.trials, keys=args.keys, seed=args.seed
    )
    if args.format == "structured":
        for pt in points:
            print(
                json.dumps(
                    {
                        "record": "failure_rate",
                        "n": params.n,
                        "k": params.k,
                        "w": pt.weight,
                        "trials": pt.trials,
                        "failures": pt.failures,
                        "flagged": pt.flagged,
                        "rate": pt.rate,
                        "ci_low": pt.ci_low,
                        "ci_high": pt.ci_high,
                    },
                    sort_keys=True,
                )
            )
    else:
        print(f"(n, k, t) = ({params.n}, {params.k}, {params.t}), policy {params.selection_policy}, {args.keys} keys")
        print(f"{'w':>4}  {'trials':>7}  {'failures':>8}  {'rate':>8}  95% interval")
        for pt in points:
            print(
                f"{pt.weight:4d}  {pt.trials:7d}  {pt.failures:8d}  {pt.rate:8.4f}  [{pt.ci_low:.4f}, {pt.ci_high:.4f}]"
            )
    return 0


def cmd_tables(args, parser) -> int:
    rows = table_rows()
    if args.format == "structured":
        for row in rows:
            print(json.dumps(row, sort_keys=True))
    else:
        print(format_text(rows))
    return 0


def cmd_estimate(args, parser) -> int:
    n = 1 << args.m
    if not 0 < args.k < n:
        parser.error(f"k must satisfy 0 < k < n = {n}")
    w = max_error_weight(n) if args.w is None else args.w
    if not 0 <= w <= n - args.k:
        parser.error(f"w must lie in [0, {n - args.k}]")
    rep = security_report(n, args.k, w)
    record = {"record": "estimate", **rep.as_dict()}
    text = "\n".join(
        [
            f"(n, k, w) = ({n}, {args.k}, {w})",
            f"Stern work factor  2^{rep.wf_log2:.2f} at p = {rep.best.p}, ell = {rep.best.ell}",
            f"equivalent codes   N_c = 2^{rep.nc_log2:.2f}, N_s = 2^{rep.ns_log2:.2f}",
            f"permutations       N_p = 2^{rep.np_log2:.2f} (with (n-k)!: 2^{rep.np_factorial_log2:.2f})",
            f"key sizes          m_pub = {rep.m_pub_bytes:g} bytes, m_pri = {rep.m_pri_bits} bits",
        ]
    )
    _emit(args, record, text)
    return 0


# -------------------------------------------------------------- parser


def _seed_default() -> int | None:
    value = os.environ.get(SEED_ENV)
    if value is None or value == "":
        return None
    try:
        return int(value)
    except ValueError:
        raise SystemExit(f"pkcpc: error: {SEED_ENV} must be an integer, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text", help="report format")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument(
        "--seed", type=int, default=_seed_default(), help=f"RNG seed (default: ${SEED_ENV}, else system entropy)"
    )

    system = argparse.ArgumentParser(add_help=False)
    system.add_argument("-m", type=int, default=10, help="log2 block length")
    system.add_argument("-k", type=int, default=768, help="message length")
    system.add_argument("--eps", type=float, default=0.01, help="design BEC erasure probability")
    system.add_argument("--policy", choices=("all", "r0"), default="all", help="secret index-set policy")
    system.add_argument("-t", type=int, default=None, help="maximum accepted error weight")
    system.add_argument("--decode-p", type=float, default=None, help="BSC crossover for SC decoding")

    parser = argparse.ArgumentParser(prog="pkcpc", description="Polar-code public-key encryption toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", parents=[common, seeded, system], help="generate a key pair")
    p.add_argument("--public", default="pkcpc.pub", help="public key output path")
    p.add_argument("--private", default="pkcpc.key", help="private key output path")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", parents=[common, seeded], help="encrypt a file")
    p.add_argument("--public", default="pkcpc.pub", help="public key path")
    p.add_argument("-i", "--input", required=True, help="plaintext path ('-' for stdin)")
    p.add_argument("-o", "--output", required=True, help="ciphertext path ('-' for stdout)")
    p.add_argument("-w", type=int, required=True, help="weight of the fresh error in every block")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", parents=[common], help="decrypt a file")
    p.add_argument("--private", default="pkcpc.key", help="private key path")
    p.add_argument("-i", "--input", required=True, help="ciphertext path ('-' for stdin)")
    p.add_argument("-o", "--output", required=True, help="plaintext path ('-' for stdout)")
    p.add_argument("-t", type=int, default=None, help="maximum accepted error weight")
    p.add_argument("--decode-p", type=float, default=None, help="BSC crossover for SC decoding")
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("profile", parents=[common], help="dump the bit-channel reliability profile")
    p.add_argument("-m", type=int, default=10, help="log2 block length")
    p.add_argument("--eps", type=float, default=0.5, help="BEC erasure probability")
    p.add_argument(
        "--block-order",
        action="store_true",
        help="index channels by the block-form recursion (bit-reversed relative to the encoder)",
    )
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("simulate", parents=[common, seeded, system], help="decryption failure rate versus weight")
    p.add_argument("--trials", type=int, default=1000, help="messages per weight")
    p.add_argument("--keys", type=int, default=10, help="independent key pairs")
    p.add_argument("--w-max", type=int, default=None, help="largest weight (default t)")
    p.add_argument("--w-step", type=int, default=1, help="weight increment")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tables", parents=[common], help="reproduce the security tables")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("estimate", parents=[common], help="attack cost and key sizes for (n, k, w)")
    p.add_argument("-m", type=int, default=10, help="log2 block length")
    p.add_argument("-k", type=int, default=768, help="code dimension")
    p.add_argument("-w", type=int, default=None, help="error weight (default t)")
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (CliError, DecodeFailure) as exc:
        print(f"pkcpc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
