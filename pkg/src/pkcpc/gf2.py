"""Bit-packed linear algebra over GF(2).

Vectors and matrices keep their payload packed eight bits per byte,
least-significant bit first (bit ``j`` of a row lives in byte ``j // 8`` at
position ``j % 8``).  That layout is what the key files store, so packed
payloads serialize bit-exactly on every platform.

Heavy lifting happens on unpacked ``uint8`` views or on 64-bit words; the
packed form is the canonical, immutable representation.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "BitVector",
    "BitMatrix",
    "Permutation",
    "SingularMatrixError",
    "MAX_KRON_EXPONENT",
    "kron_power",
    "mat_mul",
    "vec_mat_mul",
    "invert",
    "rank",
    "submatrix",
    "bit_reversal_perm",
    "apply_perm",
    "gauss_jordan",
]

# n = 2**14 bits per side is 32 MiB packed; anything beyond is a usage error.
MAX_KRON_EXPONENT = 14


class SingularMatrixError(ValueError):
    """Raised when a matrix that must be inverted has rank below its size."""


def _pack(bits: np.ndarray) -> np.ndarray:
    return np.packbits(bits, axis=-1, bitorder="little")


def _unpack(data: np.ndarray, count: int) -> np.ndarray:
    return np.unpackbits(data, axis=-1, count=count, bitorder="little")


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _as_bits(values, ndim: int) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d bit array, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("bit arrays may only contain 0 and 1")
    return arr.astype(np.uint8, copy=False)


class BitVector:
    """Immutable row vector over GF(2)."""

    __slots__ = ("_len", "_data")

    def __init__(self, data: np.ndarray, length: int):
        data = np.asarray(data, dtype=np.uint8)
        if data.shape != ((length + 7) // 8,):
            raise ValueError(f"packed payload of shape {data.shape} does not hold {length} bits")
        if length % 8 and data.size and data[-1] >> (length % 8):
            raise ValueError("padding bits beyond the vector length must be zero")
        self._len = length
        self._data = _readonly(data.copy())

    @classmethod
    def from_bits(cls, bits) -> "BitVector":
        bits = _as_bits(bits, 1)
        return cls(_pack(bits), bits.size)

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(np.zeros((length + 7) // 8, dtype=np.uint8), length)

    @classmethod
    def unit(cls, length: int, index: int) -> "BitVector":
        bits = np.zeros(length, dtype=np.uint8)
        bits[index] = 1
        return cls.from_bits(bits)

    @classmethod
    def from_bytes(cls, raw: bytes, length: int) -> "BitVector":
        return cls(np.frombuffer(raw, dtype=np.uint8), length)

    def to_bytes(self) -> bytes:
        return self._data.tobytes()

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def bits(self) -> np.ndarray:
        """Unpacked copy as a ``uint8`` array of zeros and ones."""
        return _unpack(self._data, self._len)

    @property
    def weight(self) -> int:
        return int(np.unpackbits(self._data).sum())

    def __len__(self) -> int:
        return self._len

    def __getitem__(self, index: int) -> int:
        if not -self._len <= index < self._len:
            raise IndexError(index)
        index %= self._len
        return int(self._data[index >> 3] >> (index & 7) & 1)

    def __xor__(self, other: "BitVector") -> "BitVector":
        if len(other) != self._len:
            raise ValueError(f"length mismatch: {self._len} vs {len(other)}")
        return BitVector(self._data ^ other.data, self._len)

    __add__ = __xor__

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._len == len(other) and np.array_equal(self._data, other.data)

    def __hash__(self) -> int:
        return hash((self._len, self._data.tobytes()))

    def __repr__(self) -> str:
        if self._len <= 64:
            return f"BitVector({''.join(map(str, self.bits))})"
        return f"BitVector(len={self._len}, weight={self.weight})"


class BitMatrix:
    """Immutable dense matrix over GF(2), one packed payload per row."""

    __slots__ = ("_rows", "_cols", "_data")

    def __init__(self, data: np.ndarray, rows: int, cols: int):
        data = np.asarray(data, dtype=np.uint8)
        if data.shape != (rows, (cols + 7) // 8):
            raise ValueError(f"packed payload of shape {data.shape} does not hold {rows}x{cols} bits")
        if cols % 8 and data.size and (data[:, -1] >> (cols % 8)).any():
            raise ValueError("padding bits beyond the column count must be zero")
        self._rows = rows
        self._cols = cols
        self._data = _readonly(data.copy())

    @classmethod
    def from_bits(cls, bits) -> "BitMatrix":
        bits = _as_bits(bits, 2)
        return cls(_pack(bits), *bits.shape)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, (cols + 7) // 8), dtype=np.uint8), rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_bits(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_rows(cls, rows: list[BitVector]) -> "BitMatrix":
        if not rows:
            raise ValueError("cannot infer column count from zero rows")
        return cls(np.stack([r.data for r in rows]), len(rows), len(rows[0]))

    @property
    def shape(self) -> tuple[int, int]:
        return self._rows, self._cols

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def bits(self) -> np.ndarray:
        return _unpack(self._data, self._cols)

    @property
    def T(self) -> "BitMatrix":
        return BitMatrix.from_bits(self.bits.T)

    def row(self, i: int) -> BitVector:
        return BitVector(self._data[i], self._cols)

    def hstack(self, other: "BitMatrix") -> "BitMatrix":
        if other.rows != self._rows:
            raise ValueError(f"row mismatch: {self._rows} vs {other.rows}")
        return BitMatrix.from_bits(np.hstack([self.bits, other.bits]))

    def rank(self) -> int:
        return rank(self)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return mat_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._data, other.data)

    def __hash__(self) -> int:
        return hash((self.shape, self._data.tobytes()))

    def __repr__(self) -> str:
        if self._rows <= 8 and self._cols <= 16:
            body = ", ".join("".join(map(str, r)) for r in self.bits)
            return f"BitMatrix([{body}])"
        return f"BitMatrix({self._rows}x{self._cols})"


class Permutation:
    """Index-array permutation.

    ``map[j]`` is the source index feeding output position ``j``, so applying
    the permutation to ``v`` gives ``v[map]``.  As a matrix acting on row
    vectors (``v @ P``) the single 1 of column ``j`` sits in row ``map[j]``.
    """

    __slots__ = ("_map",)

    def __init__(self, mapping):
        arr = np.asarray(mapping, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("permutation map must be one-dimensional")
        check = np.zeros(arr.size, dtype=bool)
        if arr.size and (arr.min() < 0 or arr.max() >= arr.size):
            raise ValueError("permutation entries out of range")
        check[arr] = True
        if not check.all():
            raise ValueError("permutation map is not a bijection")
        self._map = _readonly(arr.copy())

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    @property
    def n(self) -> int:
        return self._map.size

    @property
    def map(self) -> np.ndarray:
        return self._map

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self._map)
        inv[self._map] = np.arange(self._map.size)
        return Permutation(inv)

    def then(self, other: "Permutation") -> "Permutation":
        """Permutation equal to applying ``self`` first and ``other`` second."""
        if other.n != self.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        return Permutation(self._map[other.map])

    def matrix(self) -> BitMatrix:
        """Dense ``n x n`` matrix ``P`` with ``v @ P == apply_perm(v, self)``."""
        bits = np.zeros((self.n, self.n), dtype=np.uint8)
        bits[self._map, np.arange(self.n)] = 1
        return BitMatrix.from_bits(bits)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self._map, other.map)

    def __hash__(self) -> int:
        return hash(self._map.tobytes())

    def __repr__(self) -> str:
        if self.n <= 16:
            return f"Permutation({tuple(int(i) for i in self._map)})"
        return f"Permutation(n={self.n})"


def _exponent_of(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"n must be a power of two, got {n}")
    return n.bit_length() - 1


@lru_cache(maxsize=None)
def _kron_bits(m: int) -> np.ndarray:
    g = np.ones((1, 1), dtype=np.uint8)
    kernel = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    for _ in range(m):
        g = np.kron(kernel, g)
    return _readonly(g)


@lru_cache(maxsize=None)
def kron_power(m: int, bit_reversed: bool = False) -> BitMatrix:
    """Return ``G_2^{(x)m}`` for the kernel ``[[1, 0], [1, 1]]``.

    With ``bit_reversed=True`` the rows are reordered by the bit-reversal
    permutation, giving ``B_n G_2^{(x)m}``.  Both matrices are involutions;
    only the natural-order one is lower triangular.
    """
    if m < 0:
        raise ValueError("exponent must be non-negative")
    if m > MAX_KRON_EXPONENT:
        raise ValueError(f"2**{m} exceeds the supported block length 2**{MAX_KRON_EXPONENT}")
    bits = _kron_bits(m)
    if bit_reversed:
        bits = bits[bit_reversal_perm(1 << m).map]
    return BitMatrix.from_bits(bits)


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    # float BLAS is exact while partial sums stay below the mantissa range
    dtype = np.float32 if a.cols < (1 << 24) else np.float64
    prod = a.bits.astype(dtype) @ b.bits.astype(dtype)
    return BitMatrix.from_bits((prod.astype(np.int64) & 1).astype(np.uint8))


def vec_mat_mul(v: BitVector, a: BitMatrix) -> BitVector:
    if len(v) != a.rows:
        raise ValueError(f"dimension mismatch: vector of {len(v)} @ {a.shape}")
    selected = a.data[v.bits.astype(bool)]
    if selected.shape[0] == 0:
        return BitVector.zeros(a.cols)
    return BitVector(np.bitwise_xor.reduce(selected, axis=0), a.cols)


def _to_words(bits: np.ndarray) -> np.ndarray:
    packed = np.packbits(bits, axis=-1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    if pad:
        packed = np.pad(packed, ((0, 0), (0, pad)))
    return np.ascontiguousarray(packed).view("<u8").copy()


def _from_words(words: np.ndarray, cols: int) -> np.ndarray:
    return np.unpackbits(words.view(np.uint8), axis=-1, count=cols, bitorder="little")


def gauss_jordan(bits: np.ndarray, pivot_cols=None) -> tuple[np.ndarray, list[int]]:
    """Reduce a 0/1 array to reduced row-echelon form over GF(2).

    Pivots are searched in ``pivot_cols`` order (default: every column left
    to right); elimination always spans the full row width.  Returns the
    reduced array and the list of pivot columns, one per pivot row.
    """
    rows, cols = bits.shape
    words = _to_words(bits)
    order = range(cols) if pivot_cols is None else pivot_cols
    pivots: list[int] = []
    r = 0
    for col in order:
        if r == rows:
            break
        w, b = divmod(int(col), 64)
        column = (words[:, w] >> np.uint64(b)) & np.uint64(1)
        hits = np.flatnonzero(column[r:])
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
            column[[r, p]] = column[[p, r]]
        mask = column.astype(bool)
        mask[r] = False
        words[mask] ^= words[r]
        pivots.append(int(col))
        r += 1
    return _from_words(words, cols), pivots


def rank(a: BitMatrix) -> int:
    return len(gauss_jordan(a.bits)[1])


def invert(a: BitMatrix) -> BitMatrix:
    """Gauss-Jordan inverse; raises :class:`SingularMatrixError` when rank < n."""
    n, cols = a.shape
    if n != cols:
        raise ValueError(f"only square matrices are invertible, got {a.shape}")
    aug = np.hstack([a.bits, np.eye(n, dtype=np.uint8)])
    reduced, pivots = gauss_jordan(aug, pivot_cols=range(n))
    if len(pivots) < n:
        raise SingularMatrixError(f"matrix has rank {len(pivots)} < {n}")
    return BitMatrix.from_bits(reduced[:, n:])


def _check_indices(idx, bound: int, what: str) -> np.ndarray:
    arr = np.asarray(idx, dtype=np.int64).reshape(-1)
    if arr.size and (arr[0] < 0 or arr[-1] >= bound):
        raise IndexError(f"{what} indices out of range [0, {bound})")
    if arr.size > 1 and not (np.diff(arr) > 0).all():
        raise ValueError(f"{what} indices must be strictly increasing")
    return arr


def submatrix(a: BitMatrix, row_idx, col_idx) -> BitMatrix:
    rows = _check_indices(row_idx, a.rows, "row")
    cols = _check_indices(col_idx, a.cols, "column")
    return BitMatrix.from_bits(a.bits[np.ix_(rows, cols)])


def bit_reversal_perm(n: int) -> Permutation:
    m = _exponent_of(n)
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for bit in range(m):
        rev |= ((idx >> bit) & 1) << (m - 1 - bit)
    return Permutation(rev)


def apply_perm(v: BitVector, p: Permutation, inverse: bool = False) -> BitVector:
    """Return ``v P`` (or ``v P^{-1}`` when ``inverse`` is set)."""
    if len(v) != p.n:
        raise ValueError(f"length mismatch: vector of {len(v)}, permutation of {p.n}")
    bits = v.bits
    if inverse:
        out = np.empty_like(bits)
        out[p.map] = bits
    else:
        out = bits[p.map]
    return BitVector.from_bits(out)
