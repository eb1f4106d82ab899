"""Divided power algebras O(n;1) and the vectorial algebras over them.

With the shearing vector fixed at (1,...,1) -- the only restricted case --
O(n;1) is spanned by u^(r) with 0 <= r_i < p and

    u^(r) u^(s) = prod_i binom(r_i + s_i, r_i) u^(r+s),

zero as soon as some r_i + s_i >= p.  Vector fields are represented
faithfully as operators on O(n;1); brackets, powers and divergences are
plain matrix computations there.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb

import numpy as np

from .algebra import LieSuperAlgebra
from .linalg import Subspace, check_prime
from ._kernels import matpow_mod, rref_mod


@dataclass(frozen=True)
class DividedPowerAlgebra:
    """O(n;1) over GF(p) with its monomial basis and product table."""

    n: int
    p: int

    @property
    def monomials(self) -> list[tuple[int, ...]]:
        return list(product(range(self.p), repeat=self.n))

    @property
    def dim(self) -> int:
        return self.p ** self.n

    def index(self, r) -> int:
        r = tuple(r)
        i = 0
        for x in r:
            i = i * self.p + x
        return i

    def product_coeff(self, r, s) -> int:
        c = 1
        for a, b in zip(r, s):
            if a + b >= self.p:
                return 0
            c = (c * comb(a + b, a)) % self.p
        return c

    def multiply(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.int64)
        mons = self.monomials
        for i in np.nonzero(f)[0]:
            for j in np.nonzero(g)[0]:
                c = self.product_coeff(mons[i], mons[j])
                if c:
                    t = tuple(a + b for a, b in zip(mons[i], mons[j]))
                    out[self.index(t)] = (out[self.index(t)] + c * f[i] * g[j]) % self.p
        return out

    def partial(self, i: int) -> np.ndarray:
        """Matrix of the distinguished derivative d/du_i on O(n;1)."""
        d = np.zeros((self.dim, self.dim), dtype=np.int64)
        for r in self.monomials:
            if r[i] > 0:
                s = list(r)
                s[i] -= 1
                d[self.index(s), self.index(r)] = 1
        return d


@dataclass
class VectorField:
    """sum_i f_i d_i with coefficients in O(n;1)."""

    O: DividedPowerAlgebra
    coeffs: np.ndarray  # shape (n, dim O)

    def operator(self) -> np.ndarray:
        """The field as an operator on O(n;1)."""
        out = np.zeros((self.O.dim, self.O.dim), dtype=np.int64)
        mons = self.O.monomials
        for i in range(self.O.n):
            d = self.O.partial(i)
            for j in np.nonzero(self.coeffs[i])[0]:
                # multiplication by u^(mons[j]) as a matrix, applied after d_i
                for k, r in enumerate(mons):
                    c = self.O.product_coeff(mons[j], r)
                    if c:
                        t = tuple(a + b for a, b in zip(mons[j], r))
                        row = self.O.index(t)
                        out[row] = (out[row] + c * self.coeffs[i][j] * d[k]) % self.O.p
        return out


def monomial_field(O: DividedPowerAlgebra, i: int, r) -> np.ndarray:
    """Coordinates of u^(r) d_i inside vect(n;1)."""
    v = np.zeros(O.n * O.dim, dtype=np.int64)
    v[i * O.dim + O.index(r)] = 1
    return v


def field_operator(O: DividedPowerAlgebra, v: np.ndarray) -> np.ndarray:
    return VectorField(O, np.asarray(v, dtype=np.int64).reshape(O.n, O.dim)).operator()


def operator_to_field(O: DividedPowerAlgebra, M: np.ndarray) -> np.ndarray:
    """Read a derivation of O(n;1) back as a vector field: f_i = M(u_i)."""
    out = np.zeros((O.n, O.dim), dtype=np.int64)
    for i in range(O.n):
        e = [0] * O.n
        e[i] = 1
        out[i] = M[:, O.index(e)] % O.p
    return out.reshape(-1)


def build_vect(n: int, p: int) -> tuple[LieSuperAlgebra, dict[int, np.ndarray]]:
    """vect(n;1) with its structure constants and the p-map images D -> D^p.

    Basis order: for i = 0..n-1, monomials of O(n;1) in index order.
    Returns the algebra and the dict of even-basis p-map images (pass it to
    jacobson_extend)."""
    check_prime(p)
    O = DividedPowerAlgebra(n, p)
    dim = n * O.dim
    names = []
    for i in range(n):
        for r in O.monomials:
            sup = "".join(str(x) for x in r)
            names.append(f"u^({sup})d{i + 1}")
    ops = [field_operator(O, monomial_field(O, i, r))
           for i in range(n) for r in O.monomials]
    sc = {}
    for a in range(dim):
        for b in range(a + 1, dim):
            w = (ops[a] @ ops[b] - ops[b] @ ops[a]) % p
            v = operator_to_field(O, w)
            terms = [(int(k), int(v[k])) for k in np.nonzero(v)[0]]
            if terms:
                sc[(a, b)] = terms
    alg = LieSuperAlgebra(p, names, ["even"] * dim, sc)
    images = {}
    for a in range(dim):
        images[a] = operator_to_field(O, matpow_mod(ops[a], p, p))
    return alg, images


def divergence(O: DividedPowerAlgebra, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64).reshape(O.n, O.dim)
    out = np.zeros(O.dim, dtype=np.int64)
    for i in range(O.n):
        out = (out + O.partial(i) @ v[i]) % O.p
    return out


def hamiltonian_pair_field(O: DividedPowerAlgebra, i: int, j: int, r) -> np.ndarray:
    """D_{i,j}(u^(r)) = d_j(u^(r)) d_i - d_i(u^(r)) d_j as a vect vector."""
    out = np.zeros(O.n * O.dim, dtype=np.int64)
    r = tuple(r)
    if r[j] > 0:
        s = list(r)
        s[j] -= 1
        out[i * O.dim + O.index(s)] = 1
    if r[i] > 0:
        s = list(r)
        s[i] -= 1
        out[j * O.dim + O.index(s)] = (out[j * O.dim + O.index(s)] - 1) % O.p
    return out


def svect1_spanning(O: DividedPowerAlgebra) -> list[tuple[tuple, np.ndarray]]:
    """The D_{i,j}(u^(r)) spanning family, tagged by (i, j, r), ordered by
    total degree of the field, then monomial index, then the pair (i, j)."""
    tagged = []
    for r in O.monomials:
        for (i, j) in ((0, 1), (0, 2), (1, 2)):
            v = hamiltonian_pair_field(O, i, j, r)
            if v.any():
                tagged.append(((i, j, tuple(r)), v))
    tagged.sort(key=lambda t: (sum(t[0][2]), O.index(t[0][2]), t[0][:2]))
    return tagged


def svect1_basis(O: DividedPowerAlgebra) -> tuple[list[tuple], np.ndarray]:
    """Greedy independent subfamily of the spanning family, in its order."""
    tags, rows = [], []
    current = np.zeros((0, O.n * O.dim), dtype=np.int64)
    rk = 0
    for tag, v in svect1_spanning(O):
        stacked = np.vstack([current, v.reshape(1, -1)])
        r, new_rk, _ = rref_mod(stacked, O.p)
        if new_rk > rk:
            tags.append(tag)
            rows.append(v)
            current, rk = r[:new_rk], new_rk
    return tags, np.array(rows, dtype=np.int64)


__all__ = [
    "DividedPowerAlgebra",
    "VectorField",
    "build_vect",
    "divergence",
    "field_operator",
    "hamiltonian_pair_field",
    "monomial_field",
    "operator_to_field",
    "svect1_basis",
    "svect1_spanning",
]
