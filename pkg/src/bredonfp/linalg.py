"""Exact linear algebra over prime fields F_p.

Matrices are dense.  Over F_2 elimination runs on rows packed into Python
integers (one bit per column); for odd p it runs on int64 numpy arrays.
Pivoting is deterministic: columns left to right, and within a column the
first remaining row with a nonzero entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import CharacteristicError, DimensionError

MAX_PRIME = 1 << 20


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """``a @ b mod p`` for arrays of residues; uses floating-point BLAS while every sum stays exact."""
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    inner = a.shape[-1] if a.ndim else 0
    if inner * (p - 1) ** 2 < 2 ** 53:
        out = a.astype(np.float64) @ b.astype(np.float64)
        return np.rint(out).astype(np.int64) % p
    return (a @ b) % p


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p) or p >= MAX_PRIME:
        raise CharacteristicError(f"p = {p} is not a supported prime")
    return p


class FpMatrix:
    """An immutable matrix over F_p acting on column vectors."""

    __slots__ = ("p", "a")

    def __init__(self, a, p: int) -> None:
        arr = np.array(a, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise DimensionError("FpMatrix needs a 2-d array")
        arr %= p
        arr.flags.writeable = False
        self.p = p
        self.a = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray, p: int) -> "FpMatrix":
        # trusted constructor: arr already reduced and owned
        m = object.__new__(cls)
        arr.flags.writeable = False
        m.p = p
        m.a = arr
        return m

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "FpMatrix":
        return cls._wrap(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, p: int, n: int) -> "FpMatrix":
        return cls._wrap(np.eye(n, dtype=np.int64), p)

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape  # type: ignore[return-value]

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def T(self) -> "FpMatrix":
        return FpMatrix._wrap(self.a.T.copy(), self.p)

    def _same_field(self, other: "FpMatrix") -> None:
        if not isinstance(other, FpMatrix):
            raise TypeError(f"expected FpMatrix, got {type(other).__name__}")
        if other.p != self.p:
            raise CharacteristicError(f"mixing F_{self.p} and F_{other.p}")

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        self._same_field(other)
        if self.cols != other.rows:
            raise DimensionError(f"cannot compose {self.shape} with {other.shape}")
        return FpMatrix._wrap(matmul_mod(self.a, other.a, self.p), self.p)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return FpMatrix._wrap((self.a + other.a) % self.p, self.p)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {self.shape} and {other.shape}")
        return FpMatrix._wrap((self.a - other.a) % self.p, self.p)

    def __neg__(self) -> "FpMatrix":
        return FpMatrix._wrap((-self.a) % self.p, self.p)

    def scale(self, c: int) -> "FpMatrix":
        return FpMatrix._wrap((self.a * (c % self.p)) % self.p, self.p)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(np.array_equal(self.a, other.a))

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.a.any()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "FpMatrix":
        return FpMatrix._wrap(self.a[np.ix_(list(rows), list(cols))].copy(), self.p)

    def to_list(self) -> list[list[int]]:
        return self.a.tolist()

    def to_json(self) -> str:
        return json.dumps({"p": self.p, "rows": self.rows, "cols": self.cols, "entries": self.to_list()})

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, shape={self.shape})"

    # convenience wrappers
    def rank(self) -> int:
        return rank(self)

    def nullspace(self) -> "FpMatrix":
        return nullspace(self)


def hstack(blocks: Sequence[FpMatrix], p: int, rows: int | None = None) -> FpMatrix:
    if not blocks:
        return FpMatrix.zeros(p, rows or 0, 0)
    return FpMatrix._wrap(np.hstack([b.a for b in blocks]), p)


def vstack(blocks: Sequence[FpMatrix], p: int, cols: int | None = None) -> FpMatrix:
    if not blocks:
        return FpMatrix.zeros(p, 0, cols or 0)
    return FpMatrix._wrap(np.vstack([b.a for b in blocks]), p)


def block_diag(blocks: Sequence[FpMatrix], p: int) -> FpMatrix:
    r = sum(b.rows for b in blocks)
    c = sum(b.cols for b in blocks)
    out = np.zeros((r, c), dtype=np.int64)
    i = j = 0
    for b in blocks:
        out[i:i + b.rows, j:j + b.cols] = b.a
        i += b.rows
        j += b.cols
    return FpMatrix._wrap(out, p)


# ---------------------------------------------------------------------------
# elimination kernels


def _pack_rows(a: np.ndarray) -> list[int]:
    if a.shape[1] == 0:
        return [0] * a.shape[0]
    packed = np.packbits(a.astype(np.uint8), axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _unpack_rows(rows: list[int], ncols: int) -> np.ndarray:
    nbytes = (ncols + 7) // 8
    out = np.zeros((len(rows), ncols), dtype=np.int64)
    if ncols == 0:
        return out
    for i, r in enumerate(rows):
        bits = np.unpackbits(
            np.frombuffer(r.to_bytes(nbytes, "little"), dtype=np.uint8), bitorder="little"
        )
        out[i] = bits[:ncols]
    return out


def _rref_gf2(a: np.ndarray, pivot_cols: int) -> tuple[np.ndarray, list[int]]:
    rows = _pack_rows(a)
    pivots: list[int] = []
    r = 0
    n = len(rows)
    for col in range(pivot_cols):
        if r == n:
            break
        bit = 1 << col
        piv = next((i for i in range(r, n) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        for i in range(n):
            if i != r and rows[i] & bit:
                rows[i] ^= pr
        pivots.append(col)
        r += 1
    return _unpack_rows(rows, a.shape[1]), pivots


def _rref_modp(a: np.ndarray, p: int, pivot_cols: int) -> tuple[np.ndarray, list[int]]:
    a = a.copy()
    pivots: list[int] = []
    r = 0
    n = a.shape[0]
    for col in range(pivot_cols):
        if r == n:
            break
        nz = np.nonzero(a[r:, col])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, col]), -1, p)
        a[r] = (a[r] * inv) % p
        others = np.nonzero(a[:, col])[0]
        others = others[others != r]
        if others.size:
            a[others] = (a[others] - np.outer(a[others, col], a[r])) % p
        pivots.append(col)
        r += 1
    return a, pivots


def rref_array(a: np.ndarray, p: int, pivot_cols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of an int array; pivots searched only in the first ``pivot_cols`` columns."""
    if pivot_cols is None:
        pivot_cols = a.shape[1]
    if p == 2:
        return _rref_gf2(a % 2, pivot_cols)
    return _rref_modp(a % p, p, pivot_cols)


def _rank_gf2(a: np.ndarray) -> int:
    # xor basis keyed by highest set bit
    basis: dict[int, int] = {}
    for row in _pack_rows(a % 2):
        while row:
            top = row.bit_length() - 1
            if top in basis:
                row ^= basis[top]
            else:
                basis[top] = row
                break
    return len(basis)


def _rank_modp(a: np.ndarray, p: int) -> int:
    a = a.copy()
    r = 0
    n, m = a.shape
    for col in range(m):
        if r == n:
            break
        nz = np.nonzero(a[r:, col])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, col]), -1, p)
        a[r] = (a[r] * inv) % p
        below = r + 1 + np.nonzero(a[r + 1:, col])[0]
        if below.size:
            a[below] = (a[below] - np.outer(a[below, col], a[r])) % p
        r += 1
    return r


# ---------------------------------------------------------------------------
# public operations


def rref(M: FpMatrix) -> tuple[FpMatrix, list[int]]:
    R, piv = rref_array(M.a, M.p)
    return FpMatrix._wrap(R, M.p), piv


def rank(M: FpMatrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    if M.p == 2:
        return _rank_gf2(M.a)
    # eliminate along the shorter side
    a = M.a if M.rows >= M.cols else M.a.T
    return _rank_modp(a.copy(), M.p)


def nullspace(M: FpMatrix) -> FpMatrix:
    """Basis of ``{x : Mx = 0}`` as the columns of the result, one per free column.

    The basis vector for free column ``j`` has a 1 in position ``j`` and zeros at
    the other free positions, so the basis is the reduced echelon one.
    """
    p = M.p
    n = M.cols
    R, piv = rref_array(M.a, p)
    free = [j for j in range(n) if j not in set(piv)]
    out = np.zeros((n, len(free)), dtype=np.int64)
    for k, j in enumerate(free):
        out[j, k] = 1
        for i, pc in enumerate(piv):
            out[pc, k] = (-R[i, j]) % p
    return FpMatrix._wrap(out, p)


def solve(M: FpMatrix, b: FpMatrix) -> FpMatrix | None:
    """A particular solution of ``M X = b`` (free variables zero), or None if inconsistent."""
    if b.p != M.p:
        raise CharacteristicError("mixing characteristics in solve")
    if b.rows != M.rows:
        raise DimensionError(f"right-hand side has {b.rows} rows, matrix has {M.rows}")
    return LinearSolver(M).solve(b)


def inverse(M: FpMatrix) -> FpMatrix | None:
    if M.rows != M.cols:
        raise DimensionError("only square matrices are invertible")
    return solve(M, FpMatrix.identity(M.p, M.rows)) if rank(M) == M.rows else None


class LinearSolver:
    """Row-reduces ``M`` once and then solves ``M X = B`` for many right-hand sides."""

    def __init__(self, M: FpMatrix) -> None:
        self.p = M.p
        self.shape = M.shape
        m, n = M.shape
        aug = np.hstack([M.a, np.eye(m, dtype=np.int64)])
        R, piv = rref_array(aug, M.p, pivot_cols=n)
        self.pivots = piv
        self.rank = len(piv)
        self._transform = R[:, n:]  # T with T M = rref(M)

    def solve(self, b: FpMatrix) -> FpMatrix | None:
        m, n = self.shape
        c = matmul_mod(self._transform, b.a, self.p)
        if c[self.rank:].any():
            return None
        x = np.zeros((n, b.cols), dtype=np.int64)
        if self.rank:
            x[self.pivots] = c[: self.rank]
        return FpMatrix._wrap(x, self.p)

    def solvable_columns(self, b: FpMatrix) -> np.ndarray:
        c = matmul_mod(self._transform, b.a, self.p)
        return ~c[self.rank:].any(axis=0)


def operator_matrix(op: Callable[[np.ndarray], np.ndarray], n_unknowns: int, p: int) -> FpMatrix:
    """Matrix of a linear map on F_p^n obtained by applying it to the unit vectors."""
    cols = []
    for j in range(n_unknowns):
        e = np.zeros(n_unknowns, dtype=np.int64)
        e[j] = 1
        cols.append(np.asarray(op(e), dtype=np.int64).reshape(-1))
    if not cols:
        return FpMatrix.zeros(p, len(np.asarray(op(np.zeros(0, dtype=np.int64))).reshape(-1)), 0)
    return FpMatrix(np.stack(cols, axis=1), p)


def solve_affine_operator(
    op: Callable[[np.ndarray], np.ndarray] | FpMatrix,
    target: np.ndarray | FpMatrix,
    p: int,
    n_unknowns: int | None = None,
) -> np.ndarray | None:
    """Find ``x`` with ``op(x) = target``, where ``op`` is linear on a space of (flattened) matrices.

    ``op`` is either a callable on flat int vectors (then ``n_unknowns`` is
    required) or its matrix.  Returns the flat solution or None when the affine
    system is infeasible.
    """
    if isinstance(op, FpMatrix):
        A = op
    else:
        if n_unknowns is None:
            raise ValueError("n_unknowns is required for a callable operator")
        A = operator_matrix(op, n_unknowns, p)
    t = target.a if isinstance(target, FpMatrix) else np.asarray(target, dtype=np.int64)
    sol = solve(A, FpMatrix(t.reshape(-1, 1), p))
    return None if sol is None else sol.a[:, 0].copy()


# ---------------------------------------------------------------------------
# chain complexes


@dataclass
class FpChainComplex:
    """A bounded complex of finite-dimensional F_p vector spaces.

    ``dims[i]`` is the dimension in degree ``lo + i``.  For a chain complex
    ``diffs[i]`` is the map from degree ``lo + i`` to ``lo + i - 1``; for a
    cochain complex it is the map from degree ``lo + i`` to ``lo + i + 1``.
    Missing boundary maps (at the ends) are taken to be zero.
    """

    p: int
    dims: list[int]
    diffs: list[FpMatrix | None]
    lo: int = 0
    cochain: bool = False
    checked: bool = field(default=True, repr=False)

    def __post_init__(self) -> None:
        if len(self.diffs) != len(self.dims):
            raise DimensionError("need one differential slot per degree")
        n = len(self.dims)
        for i, d in enumerate(self.diffs):
            if d is None:
                continue
            if d.p != self.p:
                raise CharacteristicError("differential over the wrong field")
            j = i + 1 if self.cochain else i - 1
            tgt = self.dims[j] if 0 <= j < n else 0
            if d.shape != (tgt, self.dims[i]):
                raise DimensionError(
                    f"differential out of degree {self.lo + i} has shape {d.shape}, "
                    f"expected {(tgt, self.dims[i])}"
                )
        if self.checked:
            for i in range(n):
                j = i + 1 if self.cochain else i - 1
                if not 0 <= j < n:
                    continue
                d1, d2 = self.diffs[i], self.diffs[j]
                if d1 is not None and d2 is not None and not (d2 @ d1).is_zero():
                    raise DimensionError(f"d o d != 0 at degree {self.lo + i}")

    @property
    def hi(self) -> int:
        return self.lo + len(self.dims) - 1

    def rank_out(self, i: int) -> int:
        d = self.diffs[i]
        return 0 if d is None else rank(d)

    def euler_characteristic(self) -> int:
        return sum((-1) ** (self.lo + i) * d for i, d in enumerate(self.dims))


def homology_dims(C: FpChainComplex) -> list[int]:
    """Dimensions of (co)homology in degrees ``lo..hi``."""
    n = len(C.dims)
    ranks = [C.rank_out(i) for i in range(n)]
    out = []
    for i in range(n):
        incoming = i - 1 if C.cochain else i + 1
        r_in = ranks[incoming] if 0 <= incoming < n else 0
        out.append(C.dims[i] - ranks[i] - r_in)
    return out
