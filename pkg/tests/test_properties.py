import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pkcpc.gf2 import (
    BitMatrix,
    BitVector,
    Permutation,
    SingularMatrixError,
    apply_perm,
    invert,
    kron_power,
    mat_mul,
    rank,
    vec_mat_mul,
)
from pkcpc.polar import bhattacharyya_profile, build_code, build_parity_check, encode, polar_transform, sc_decode
from pkcpc.scheme import (
    SystemParams,
    decrypt_batch,
    deserialize_private,
    deserialize_public,
    encode_message_bits,
    keygen,
    serialize_private,
    serialize_public,
)
from pkcpc.security import SternParams, log2_binomial, optimize_stern, stern_workfactor

FAST = settings(max_examples=40, deadline=None)


def bit_arrays(rows, cols):
    return arrays(np.uint8, (rows, cols), elements=st.integers(0, 1))


@st.composite
def matrix_chain(draw):
    a, b, c, d = (draw(st.integers(1, 70)) for _ in range(4))
    return draw(bit_arrays(a, b)), draw(bit_arrays(b, c)), draw(bit_arrays(c, d))


@FAST
@given(matrix_chain())
def test_mat_mul_associative(chain):
    x, y, z = (BitMatrix.from_bits(m) for m in chain)
    assert mat_mul(mat_mul(x, y), z) == mat_mul(x, mat_mul(y, z))


@FAST
@given(st.integers(1, 40).flatmap(lambda n: bit_arrays(n, n)))
def test_invert_is_two_sided_or_singular(bits):
    a = BitMatrix.from_bits(bits)
    n = a.rows
    try:
        inv = invert(a)
    except SingularMatrixError:
        assert rank(a) < n
        return
    assert mat_mul(a, inv) == BitMatrix.identity(n) == mat_mul(inv, a)


@FAST
@given(st.integers(1, 90).flatmap(lambda n: bit_arrays(1, n)))
def test_bitvector_bytes_roundtrip(bits):
    v = BitVector.from_bits(bits[0])
    assert BitVector.from_bytes(v.to_bytes(), len(v)) == v


@FAST
@given(st.integers(1, 60).flatmap(lambda n: st.tuples(bit_arrays(1, n), st.permutations(range(n)))))
def test_apply_perm_inverse_and_weight(case):
    bits, order = case
    v = BitVector.from_bits(bits[0])
    p = Permutation(order)
    w = apply_perm(v, p)
    assert w.weight == v.weight
    assert apply_perm(w, p, inverse=True) == v
    assert vec_mat_mul(v, p.matrix()) == w


@FAST
@given(st.integers(0, 7))
def test_kron_power_involution(m):
    g = kron_power(m)
    assert mat_mul(g, g) == BitMatrix.identity(1 << m)


@FAST
@given(st.integers(1, 9).flatmap(lambda m: bit_arrays(3, 1 << m)))
def test_fast_transform_equals_generator(u):
    g = kron_power(int(np.log2(u.shape[1]))).bits.astype(int)
    np.testing.assert_array_equal(polar_transform(u), u.astype(int) @ g % 2)


@FAST
@given(st.integers(1, 10), st.floats(0.01, 0.99))
def test_profile_conserves_capacity(m, eps):
    prof = bhattacharyya_profile(1 << m, eps)
    assert np.isclose(np.sum(1 - prof.z), (1 << m) * (1 - eps), rtol=1e-9)
    assert np.all((prof.z >= 0) & (prof.z <= 1))
    assert np.all(np.diff(prof.z[prof.pi.map]) >= 0)


@st.composite
def code_and_input(draw):
    m = draw(st.integers(1, 7))
    n = 1 << m
    info = draw(st.lists(st.integers(0, n - 1), unique=True, max_size=n))
    code = build_code(n, info)
    u = draw(bit_arrays(1, code.k))[0]
    frozen = draw(bit_arrays(1, n - code.k))[0]
    return code, u, frozen


@FAST
@given(code_and_input())
def test_noiseless_sc_inverts_encoder(case):
    code, u, frozen = case
    x = encode(code, BitVector.from_bits(u), BitVector.from_bits(frozen))
    llr = np.where(x.bits == 1, -np.inf, np.inf)
    u_hat = sc_decode(code, llr, BitVector.from_bits(frozen))
    assert np.array_equal(u_hat.bits[code.info_set], u)


@FAST
@given(code_and_input())
def test_parity_check_annihilates_code(case):
    code, _, _ = case
    if code.k and code.k < code.n:
        assert not mat_mul(code.gen, build_parity_check(code)).bits.any()
    assert code.gen.rank() == code.k


@st.composite
def key_and_messages(draw):
    m = draw(st.integers(2, 7))
    n = 1 << m
    k = draw(st.integers(1, n - 1))
    seed = draw(st.integers(0, 2**32 - 1))
    pk, sk = keygen(SystemParams(m=m, k=k), np.random.default_rng(seed))
    msgs = draw(bit_arrays(4, k))
    return pk, sk, msgs


@FAST
@given(key_and_messages())
def test_noise_free_decryption(case):
    pk, sk, msgs = case
    out, ok = decrypt_batch(sk, encode_message_bits(pk, msgs))
    assert ok.all() and np.array_equal(out, msgs)


@FAST
@given(key_and_messages())
def test_key_serialization_roundtrip(case):
    pk, sk, _ = case
    assert deserialize_public(serialize_public(pk)) == pk
    back = deserialize_private(serialize_private(sk))
    assert back == sk and back.public_key() == pk


@FAST
@given(key_and_messages())
def test_public_block_is_systematic_form(case):
    pk, sk, _ = case
    g2 = BitMatrix.from_bits(sk.gen.bits[:, sk.perm.map])
    assert np.array_equal(mat_mul(sk.scrambler_inv, g2).bits, pk.matrix().bits)


@FAST
@given(st.integers(0, 300).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))))
def test_log2_binomial_symmetry(case):
    n, k = case
    assert np.isclose(log2_binomial(n, k), log2_binomial(n, n - k))


@settings(max_examples=25, deadline=None)
@given(st.integers(40, 200).flatmap(lambda n: st.tuples(st.just(n), st.integers(8, n - 8))), st.data())
def test_optimizer_never_loses_to_random_point(case, data):
    n, k = case
    w = data.draw(st.integers(1, min(n - k, 20)))
    p = data.draw(st.integers(0, min(w // 2, k // 2)))
    ell = data.draw(st.integers(0, n - k - (w - 2 * p)))
    assert optimize_stern(n, k, w)[1] <= stern_workfactor(n, k, w, SternParams(p, ell)) + 1e-9
