"""Exact integer matrix algebra: Smith normal form and lattice solvers.

Matrices are numpy arrays.  Computations run on int64 with an explicit
magnitude guard: entries are kept far enough below the int64 bound that no
single elimination step can wrap.  If the guard trips, the computation
restarts on object-dtype arrays holding Python big integers, so results are
always exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SNF", "smith_normal_form", "snf", "solve_int", "kernel_basis", "det"]

# With all participating entries bounded by _GUARD, one elimination step
# produces values below 2**51, well inside int64.
_GUARD = 1 << 25


class _Overflow(Exception):
    pass


def _asarray(a, big: bool) -> np.ndarray:
    src = np.asarray(a, dtype=object)
    if src.ndim == 1:
        src = src.reshape(0, 0) if src.size == 0 else src.reshape(1, -1)
    if src.ndim != 2:
        raise ValueError("matrix expected")
    if big:
        out = np.empty(src.shape, dtype=object)
        for i in range(src.shape[0]):
            for j in range(src.shape[1]):
                out[i, j] = int(src[i, j])
        return out
    return src.astype(np.int64)


def _identity(n: int, big: bool) -> np.ndarray:
    if big:
        m = np.zeros((n, n), dtype=object)
        for i in range(n):
            m[i, i] = 1
        return m
    return np.eye(n, dtype=np.int64)


def _to_object(a: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            out[i, j] = int(a[i, j])
    return out


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact matrix/vector product via object dtype (never wraps)."""
    ao = a if a.dtype == object else _to_object(a)
    bo = np.asarray(b, dtype=object)
    return np.dot(ao, bo)


def safe_matmul(a, b) -> np.ndarray:
    """Exact matrix product: int64 BLAS path when provably wrap-free, else big ints."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    if a.dtype != object and b.dtype != object:
        a64 = a.astype(np.int64)
        b64 = b.astype(np.int64)
        ma = int(np.abs(a64).max()) if a64.size else 0
        mb = int(np.abs(b64).max()) if b64.size else 0
        inner = a64.shape[1]
        if ma * mb * max(inner, 1) < (1 << 62):
            return a64 @ b64
    return _dot(a, b)


@dataclass
class SNF:
    """U @ A @ V = D with U, V unimodular and D diagonal, d1 | d2 | ...

    ``u_inv`` and ``v_inv`` are the exact inverses of ``u`` and ``v``.
    """

    u: np.ndarray
    d: np.ndarray
    v: np.ndarray
    u_inv: np.ndarray
    v_inv: np.ndarray
    rank: int

    @property
    def diagonal(self) -> list[int]:
        k = min(self.d.shape)
        return [int(self.d[i, i]) for i in range(k)]


def _snf_inplace(a: np.ndarray, big: bool) -> SNF:
    rows, cols = a.shape
    u = _identity(rows, big)
    u_inv = _identity(rows, big)
    v = _identity(cols, big)
    v_inv = _identity(cols, big)

    # Overestimate of the largest absolute entry across all five matrices,
    # maintained so int64 batch updates can be proven wrap-free in advance.
    bound = 1
    if not big and a.size:
        bound = max(1, int(np.abs(a).max()))
        if bound > (1 << 30):
            raise _Overflow

    def recompute_bound() -> int:
        m = 1
        for mat in (a, u, u_inv, v, v_inv):
            if mat.size:
                m = max(m, int(np.abs(mat).max()))
        return m

    def admit(qsum: int):
        # allow an update multiplying the bound by (1 + qsum)
        nonlocal bound
        if big:
            return
        if bound * (1 + qsum) >= (1 << 61):
            bound = recompute_bound()
            if bound * (1 + qsum) >= (1 << 61):
                raise _Overflow
        bound *= 1 + qsum

    def row_swap(i, j):
        a[[i, j], :] = a[[j, i], :]
        u[[i, j], :] = u[[j, i], :]
        u_inv[:, [i, j]] = u_inv[:, [j, i]]

    def col_swap(i, j):
        a[:, [i, j]] = a[:, [j, i]]
        v[:, [i, j]] = v[:, [j, i]]
        v_inv[[i, j], :] = v_inv[[j, i], :]

    def row_negate(i):
        a[i, :] = -a[i, :]
        u[i, :] = -u[i, :]
        u_inv[:, i] = -u_inv[:, i]

    n = min(rows, cols)
    r = 0
    while r < n:
        block = a[r:, r:]
        if not np.any(block):
            break
        absb = np.abs(block)
        masked = np.where(absb > 0, absb, absb.max() + 1)
        i, j = np.unravel_index(int(np.argmin(masked)), masked.shape)
        if i:
            row_swap(r, r + int(i))
        if j:
            col_swap(r, r + int(j))
        if a[r, r] < 0:
            row_negate(r)
        while True:
            colv = a[r + 1 :, r]
            if np.any(colv):
                q = colv // a[r, r]
                admit(int(np.abs(q).sum()))
                a[r + 1 :, :] -= np.outer(q, a[r, :])
                u[r + 1 :, :] -= np.outer(q, u[r, :])
                u_inv[:, r] += np.dot(u_inv[:, r + 1 :], q)
                rem = a[r + 1 :, r]
                if np.any(rem):
                    i = int(np.nonzero(rem)[0][0])
                    row_swap(r, r + 1 + i)
                    if a[r, r] < 0:
                        row_negate(r)
                    continue
            roww = a[r, r + 1 :]
            if np.any(roww):
                q = roww // a[r, r]
                admit(int(np.abs(q).sum()))
                a[:, r + 1 :] -= np.outer(a[:, r], q)
                v[:, r + 1 :] -= np.outer(v[:, r], q)
                v_inv[r, :] += np.dot(q, v_inv[r + 1 :, :])
                rem = a[r, r + 1 :]
                if np.any(rem):
                    j = int(np.nonzero(rem)[0][0])
                    col_swap(r, r + 1 + j)
                    if a[r, r] < 0:
                        row_negate(r)
                    continue
                continue  # a col_swap above may have refilled column r
            break
        piv = int(a[r, r])
        if piv != 1:
            rest = a[r + 1 :, r + 1 :]
            if rest.size:
                bad = np.nonzero(rest % piv)
                if bad[0].size:
                    i = int(bad[0][0])
                    admit(1)
                    a[r, :] += a[r + 1 + i, :]
                    u[r, :] += u[r + 1 + i, :]
                    u_inv[:, r + 1 + i] -= u_inv[:, r]
                    continue  # redo this pivot with the offending row mixed in
        r += 1

    return SNF(u=u, d=a, v=v, u_inv=u_inv, v_inv=v_inv, rank=r)


def snf(matrix) -> SNF:
    """Smith normal form with transforms and their inverses."""
    try:
        return _snf_inplace(_asarray(matrix, big=False).copy(), big=False)
    except (_Overflow, OverflowError):
        return _snf_inplace(_asarray(matrix, big=True).copy(), big=True)


def smith_normal_form(matrix):
    """Return (U, D, V) with U @ A @ V = D diagonal, d1 | d2 | ..., det U, V = +-1."""
    res = snf(matrix)
    return res.u, res.d, res.v


def solve_int(a, b, snf_result: SNF | None = None):
    """One integer solution x of a @ x = b, or None if none exists.

    When several systems share the matrix, pass a precomputed ``snf_result``.
    """
    res = snf_result if snf_result is not None else snf(a)
    rows, cols = res.d.shape
    b = np.asarray([int(x) for x in np.asarray(b).reshape(-1)], dtype=object)
    if b.shape[0] != rows:
        raise ValueError("dimension mismatch")
    c = _dot(res.u, b)
    y = np.zeros(cols, dtype=object)
    for i in range(rows):
        di = int(res.d[i, i]) if i < min(rows, cols) else 0
        ci = int(c[i])
        if di == 0:
            if ci != 0:
                return None
        else:
            if ci % di:
                return None
            y[i] = ci // di
    x = _dot(res.v, y)
    return np.asarray([int(t) for t in x], dtype=object)


def kernel_basis(a, snf_result: SNF | None = None) -> np.ndarray:
    """Columns form a basis of the (saturated) integer kernel lattice of ``a``."""
    res = snf_result if snf_result is not None else snf(a)
    return np.asarray(res.v[:, res.rank :])


def det(matrix) -> int:
    """Exact integer determinant (Bareiss fraction-free elimination)."""
    a = _asarray(matrix, big=True).copy()
    n, m = a.shape
    if n != m:
        raise ValueError("square matrix expected")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k, k] == 0:
            hot = [i for i in range(k + 1, n) if a[i, k] != 0]
            if not hot:
                return 0
            a[[k, hot[0]], :] = a[[hot[0], k], :]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i, j] = (a[i, j] * a[k, k] - a[i, k] * a[k, j]) // prev
            a[i, k] = 0
        prev = a[k, k]
    return sign * int(a[n - 1, n - 1])
