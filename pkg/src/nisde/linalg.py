"""Exact dense linear algebra over the prime field GF(p).

Vectors and matrices are numpy int64 arrays with entries in {0, ..., p-1}.
A subspace is always carried around as its reduced row echelon basis, which
makes equality, membership and quotients canonical and reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import matpow_mod, rref_mod

_SMALL_PRIMES = {
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149,
    151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227,
    229, 233, 239, 241, 251,
}


def check_prime(p: int) -> int:
    if p not in _SMALL_PRIMES:
        raise ValueError(f"p must be a prime with 2 <= p <= 251, got {p}")
    return p


def asvec(v, p: int) -> np.ndarray:
    a = np.asarray(v, dtype=np.int64) % p
    if a.ndim != 1:
        raise ValueError("expected a 1-d vector")
    return a


def asmat(m, p: int) -> np.ndarray:
    a = np.asarray(m, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return a


def inv_mod(x: int, p: int) -> int:
    x %= p
    if x == 0:
        raise ZeroDivisionError("inverse of 0 in GF(p)")
    return pow(x, p - 2, p)


@dataclass(frozen=True)
class Subspace:
    """Row space of ``basis``; the basis matrix is kept in RREF."""

    ambient_dim: int
    basis: np.ndarray
    p: int

    @staticmethod
    def from_rows(rows, ambient_dim: int, p: int) -> "Subspace":
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, ambient_dim) % p
        r, rank, _ = rref_mod(rows, p)
        return Subspace(ambient_dim, r[:rank], p)

    @staticmethod
    def zero(ambient_dim: int, p: int) -> "Subspace":
        return Subspace(ambient_dim, np.zeros((0, ambient_dim), dtype=np.int64), p)

    @staticmethod
    def full(ambient_dim: int, p: int) -> "Subspace":
        return Subspace(ambient_dim, np.eye(ambient_dim, dtype=np.int64), p)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def pivots(self) -> list[int]:
        return [int(np.nonzero(row)[0][0]) for row in self.basis]

    def reduce(self, v: np.ndarray) -> np.ndarray:
        """Residue of v after eliminating against the RREF basis."""
        v = asvec(v, self.p).copy()
        for row, c in zip(self.basis, self.pivots()):
            if v[c]:
                v = (v - v[c] * row) % self.p
        return v

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis)

    def coords(self, v) -> np.ndarray:
        """Coordinates of v in the RREF basis; raises if v is outside."""
        v = asvec(v, self.p)
        c = v[self.pivots()] if self.dim else np.zeros(0, dtype=np.int64)
        if ((c @ self.basis) % self.p != v).any():
            raise ValueError("vector not in subspace")
        return c

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis.shape == other.basis.shape
            and (self.basis == other.basis).all()
        )


def rref(m, p: int) -> tuple[np.ndarray, int, list[int]]:
    return rref_mod(asmat(m, p), p)


def rank(m, p: int) -> int:
    return rref(m, p)[1]


def nullspace(m, p: int) -> Subspace:
    """Right nullspace {v : m v = 0}, dim = cols - rank."""
    m = asmat(m, p)
    rows, cols = m.shape
    r, rk, piv = rref_mod(m, p)
    free = [c for c in range(cols) if c not in piv]
    if not free:
        return Subspace.zero(cols, p)
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for a, f in enumerate(free):
        basis[a, f] = 1
        for i, c in enumerate(piv):
            basis[a, c] = (-r[i, f]) % p
    return Subspace.from_rows(basis, cols, p)


def solve(m, b, p: int):
    """Solve m x = b; returns (particular, homogeneous Subspace) or None.

    The particular solution is the canonical one with all free variables
    set to zero; the result is re-multiplied as a guard.
    """
    m = asmat(m, p)
    b = asvec(b, p)
    rows, cols = m.shape
    if b.shape[0] != rows:
        raise ValueError(f"dimension mismatch: {rows} rows vs b of length {b.shape[0]}")
    aug = np.hstack([m, b.reshape(-1, 1)])
    r, rk, piv = rref_mod(aug, p)
    if cols in piv:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = r[i, cols]
    assert ((m @ x) % p == b).all()
    return x, nullspace(m, p)


def solve_matrix(m, bs, p: int):
    """Particular solutions for several right-hand sides (columns of bs)."""
    bs = asmat(bs, p)
    outs = []
    for j in range(bs.shape[1]):
        res = solve(m, bs[:, j], p)
        if res is None:
            return None
        outs.append(res[0])
    return np.stack(outs, axis=1)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    return Subspace.from_rows(np.vstack([a.basis, b.basis]), a.ambient_dim, a.p)


def subspace_intersection(a: Subspace, b: Subspace) -> Subspace:
    """Zassenhaus: rref [[A,A],[B,0]]; zero-left rows carry the intersection."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    n, p = a.ambient_dim, a.p
    top = np.hstack([a.basis, a.basis])
    bot = np.hstack([b.basis, np.zeros_like(b.basis)])
    r, rk, _ = rref_mod(np.vstack([top, bot]), p)
    rows = [r[i, n:] for i in range(rk) if not r[i, :n].any()]
    if not rows:
        return Subspace.zero(n, p)
    return Subspace.from_rows(np.array(rows), n, p)


def quotient_basis(big: Subspace, small: Subspace) -> list[np.ndarray]:
    """Representatives completing small's basis to big's.

    Preference order is big's own basis rows, so the result is deterministic.
    """
    if not big.contains_subspace(small):
        raise ValueError("small is not contained in big")
    p = big.p
    reps = []
    current = small.basis
    for row in big.basis:
        stacked = np.vstack([current, row.reshape(1, -1)])
        _, rk, _ = rref_mod(stacked, p)
        if rk > current.shape[0]:
            reps.append(row.copy())
            current = rref_mod(stacked, p)[0][:rk]
    assert len(reps) == big.dim - small.dim
    return reps


__all__ = [
    "Subspace",
    "asmat",
    "asvec",
    "check_prime",
    "inv_mod",
    "matpow_mod",
    "nullspace",
    "quotient_basis",
    "rank",
    "rref",
    "solve",
    "solve_matrix",
    "subspace_intersection",
    "subspace_sum",
]
