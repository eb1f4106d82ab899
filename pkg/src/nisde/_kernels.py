"""Dense linear-algebra kernels over GF(p).

Row reduction is the hot inner loop of everything in this package (ranks,
nullspaces, derivation solvers, cohomology).  Two interchangeable backends
implement it:

* a numba ``@njit`` kernel (default when numba imports cleanly), and
* a pure-numpy fallback, one vectorized elimination per pivot column.

Select explicitly with the environment variable ``NISDE_BACKEND=numba`` or
``NISDE_BACKEND=numpy``.  ``benchmarks/bench_kernels.py`` times both on the
same inputs.  Both are deterministic: pivots are the first nonzero entry in
column order, so the (unique) reduced row echelon form is reached through
the same row order.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_VAR = "NISDE_BACKEND"

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via NISDE_BACKEND=numpy
    _HAVE_NUMBA = False


def _requested_backend() -> str:
    req = os.environ.get(_ENV_VAR, "auto").lower()
    if req not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be 'numba' or 'numpy', got {req!r}")
    if req == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("NISDE_BACKEND=numba requested but numba is not importable")
    return req


def active_backend() -> str:
    """Backend that rref_mod will actually run."""
    req = _requested_backend()
    if req == "auto":
        return "numba" if _HAVE_NUMBA else "numpy"
    return req


def _rref_numpy(a: np.ndarray, p: int) -> tuple[np.ndarray, int, np.ndarray]:
    rows, cols = a.shape
    a = a % p
    piv_cols = np.full(min(rows, cols), -1, dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        a -= np.outer(col, a[r])
        a %= p
        piv_cols[r] = c
        r += 1
    return a, r, piv_cols[:r]


if _HAVE_NUMBA:

    @njit(cache=True)
    def _rref_numba(a, p):  # pragma: no cover - numba-compiled
        rows, cols = a.shape
        npiv = rows if rows < cols else cols
        piv_cols = np.full(npiv, -1, dtype=np.int64)
        r = 0
        for c in range(cols):
            if r == rows:
                break
            piv = -1
            for i in range(r, rows):
                if a[i, c] != 0:
                    piv = i
                    break
            if piv == -1:
                continue
            if piv != r:
                for j in range(cols):
                    tmp = a[r, j]
                    a[r, j] = a[piv, j]
                    a[piv, j] = tmp
            # invert the pivot by Fermat: x**(p-2) mod p
            inv = np.int64(1)
            base = a[r, c] % p
            e = p - 2
            while e > 0:
                if e & 1:
                    inv = (inv * base) % p
                base = (base * base) % p
                e >>= 1
            for j in range(c, cols):
                a[r, j] = (a[r, j] * inv) % p
            for i in range(rows):
                if i != r and a[i, c] != 0:
                    f = a[i, c]
                    for j in range(c, cols):
                        a[i, j] = (a[i, j] - f * a[r, j]) % p
            piv_cols[r] = c
            r += 1
        return a, r, piv_cols[:r]


def rref_mod(mat: np.ndarray, p: int) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row echelon form of ``mat`` over GF(p).

    Returns (rref, rank, pivot column indices).  The input is not modified.
    """
    a = np.ascontiguousarray(np.asarray(mat, dtype=np.int64) % p)
    if a.ndim != 2:
        raise ValueError("rref_mod expects a 2-d array")
    if a.size == 0:
        return a.copy(), 0, []
    if active_backend() == "numba":
        r, rank, piv = _rref_numba(a.copy(), p)
    else:
        r, rank, piv = _rref_numpy(a.copy(), p)
    return r, int(rank), [int(c) for c in piv]


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def matpow_mod(m: np.ndarray, k: int, p: int) -> np.ndarray:
    """k-th power of a square matrix over GF(p) by repeated squaring."""
    n = m.shape[0]
    out = np.eye(n, dtype=np.int64)
    base = np.asarray(m, dtype=np.int64) % p
    while k > 0:
        if k & 1:
            out = (out @ base) % p
        base = (base @ base) % p
        k >>= 1
    return out
