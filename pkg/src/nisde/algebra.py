"""Structure-constant Lie (super)algebras over GF(p).

A LieSuperAlgebra stores a homogeneous basis with parities and the sparse
bracket table [e_i, e_j] for i < j (plus i == j for odd e_i).  The full
structure tensor T[i,j,k] is materialized lazily; super-anticommutativity
holds by construction of the tensor, the Jacobi identity is checked, never
assumed.

The characteristic-3 cubic identity [a,[a,a]] = 0 for odd a is *not* a
consequence of the Jacobi identity on basis triples and cannot be reduced
to them (polarization fails); it is checked symbolically on a generic odd
element.  Brackets satisfying Jacobi but not the cubic identity are
reported as pre-Lie.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import poly
from .linalg import Subspace, asvec, check_prime, nullspace, quotient_basis, rref

EVEN, ODD = 0, 1


def parity_of(token) -> int:
    if token in (0, "even", "ev"):
        return EVEN
    if token in (1, "odd", "od"):
        return ODD
    raise ValueError(f"bad parity {token!r}")


@dataclass
class AxiomReport:
    anticommutative: bool
    jacobi: bool
    char3_cubic: bool | None  # None when not applicable (p != 3 or no odd part)
    parity_compatible: bool
    witness: str = ""

    @property
    def is_lie(self) -> bool:
        return (
            self.anticommutative
            and self.jacobi
            and self.parity_compatible
            and self.char3_cubic is not False
        )

    @property
    def is_pre_lie_only(self) -> bool:
        return (
            self.anticommutative
            and self.jacobi
            and self.parity_compatible
            and self.char3_cubic is False
        )


class LieSuperAlgebra:
    def __init__(self, p: int, names, parities, sc: dict):
        """sc maps (i, j) with i < j, or i == j odd, to a list of (k, coeff)."""
        self.p = check_prime(p)
        self.names = tuple(names)
        self.parity = np.array([parity_of(x) for x in parities], dtype=np.int64)
        n = len(self.names)
        if self.parity.shape[0] != n:
            raise ValueError("names/parities length mismatch")
        self.sc = {}
        for (i, j), terms in sc.items():
            if not (0 <= i <= j < n):
                raise ValueError(f"bad bracket index pair ({i}, {j})")
            if i == j and self.parity[i] == EVEN:
                raise ValueError(f"[e_{i}, e_{i}] stored for even basis element")
            clean = [(k, c % p) for k, c in terms if c % p]
            if clean:
                self.sc[(i, j)] = tuple(clean)
        self._check_parity_compat()

    def _check_parity_compat(self):
        for (i, j), terms in self.sc.items():
            pij = (self.parity[i] + self.parity[j]) % 2
            for k, c in terms:
                if self.parity[k] != pij:
                    raise ValueError(
                        f"parity mismatch: [{self.names[i]},{self.names[j]}] hits {self.names[k]}"
                    )

    @staticmethod
    def from_tensor(p, names, parities, tensor) -> "LieSuperAlgebra":
        """Build from a full tensor T[i,j,k]; consistency of the redundant
        half is verified in check_axioms, not here."""
        tensor = np.asarray(tensor, dtype=np.int64) % p
        n = len(names)
        par = np.array([parity_of(x) for x in parities], dtype=np.int64)
        sc = {}
        for i in range(n):
            for j in range(i, n):
                if i == j and par[i] == EVEN:
                    continue
                terms = [(k, int(tensor[i, j, k])) for k in np.nonzero(tensor[i, j])[0]]
                if terms:
                    sc[(i, j)] = terms
        alg = LieSuperAlgebra(p, names, parities, sc)
        if (alg.tensor != tensor).any():
            raise ValueError("tensor violates the super-anticommutativity storage convention")
        return alg

    # -- basic structure ------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def is_super(self) -> bool:
        return bool((self.parity == ODD).any())

    def even_indices(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.parity == EVEN)[0]]

    def odd_indices(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.parity == ODD)[0]]

    def index(self, name: str) -> int:
        return self.names.index(name)

    @cached_property
    def tensor(self) -> np.ndarray:
        """Dense T[i,j,k] with [e_i,e_j] = sum_k T[i,j,k] e_k."""
        n, p = self.dim, self.p
        T = np.zeros((n, n, n), dtype=np.int64)
        for (i, j), terms in self.sc.items():
            for k, c in terms:
                T[i, j, k] = c
        # [e_j, e_i] = -(-1)^{p_i p_j} [e_i, e_j]: symmetric for odd-odd pairs
        for i in range(n):
            for j in range(i + 1, n):
                if self.parity[i] and self.parity[j]:
                    T[j, i] = T[i, j]
                else:
                    T[j, i] = (-T[i, j]) % p
        T.setflags(write=False)
        return T

    def bracket(self, a, b) -> np.ndarray:
        a = asvec(a, self.p)
        b = asvec(b, self.p)
        if a.shape[0] != self.dim or b.shape[0] != self.dim:
            raise ValueError("vector dimension does not match the algebra")
        m = np.tensordot(a, self.tensor, axes=(0, 0))  # (j, k)
        return (b @ m) % self.p

    def ad(self, a) -> np.ndarray:
        """Matrix of b |-> [a, b]."""
        a = asvec(a, self.p)
        return np.tensordot(a, self.tensor, axes=(0, 0)).T % self.p

    @cached_property
    def ad_basis(self) -> np.ndarray:
        """Stack A[i] = ad(e_i)."""
        return self.tensor.transpose(0, 2, 1).copy()

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=np.int64)
        e[i] = 1
        return e

    # -- polynomial interface ---------------------------------------------------

    def generic_element(self, parity_filter: str = "all", block: int = 0) -> poly.PolyVector:
        """Generic element sum lambda_i e_i over the selected parity block."""
        if parity_filter == "all":
            idx = range(self.dim)
        elif parity_filter == "even":
            idx = self.even_indices()
        elif parity_filter == "odd":
            idx = self.odd_indices()
        else:
            raise ValueError("parity_filter must be all|even|odd")
        return poly.PolyVector.generic(self.dim, self.p, idx, block)

    def poly_bracket(self, f: poly.PolyVector, g: poly.PolyVector) -> poly.PolyVector:
        if f.n != self.dim or g.n != self.dim:
            raise ValueError("PolyVector dimension does not match the algebra")
        return poly.bilinear_map(self.tensor, f, g, self.p)

    # -- axioms ----------------------------------------------------------------

    def check_axioms(self, check_cubic: bool = True) -> AxiomReport:
        p, n, T = self.p, self.dim, self.tensor
        parity_ok = True
        witness = ""
        pi = self.parity
        pout = (pi[:, None] + pi[None, :]) % 2
        bad = np.nonzero((T != 0) & (pout[:, :, None] != pi[None, None, :]))
        if bad[0].size:
            parity_ok = False
            witness = f"parity violation at {tuple(int(x[0]) for x in bad)}"

        sign = np.where((pi[:, None] * pi[None, :]) % 2 == 1, 1, -1)
        anti = ((T.transpose(1, 0, 2) - sign[:, :, None] * T) % p == 0).all()
        diag_even_ok = all(not T[i, i].any() for i in self.even_indices())
        anticommutative = bool(anti and diag_even_ok)
        if not anticommutative and not witness:
            witness = "anticommutativity failure"

        jacobi = True
        chunk = max(1, 4_000_000 // max(1, n * n * n))
        koszul = np.where((pi[:, None] * pi[None, :]) % 2 == 1, -1, 1)
        for i0 in range(0, n, chunk):
            i1 = min(i0 + chunk, n)
            Ts = T[i0:i1]
            lhs = np.einsum("jlk,ikm->ijlm", T, Ts)
            r1 = np.einsum("ijk,klm->ijlm", Ts, T)
            r2 = np.einsum("ilk,jkm->ijlm", Ts, T)
            defect = (lhs - r1 - koszul[i0:i1, :, None, None] * r2) % p
            if defect.any():
                jacobi = False
                w = np.argwhere(defect.any(axis=3))[0]
                witness = (
                    f"Jacobi defect at ({self.names[i0 + w[0]]}, "
                    f"{self.names[w[1]]}, {self.names[w[2]]})"
                )
                break

        cubic: bool | None = None
        if check_cubic and p == 3 and self.is_super and jacobi:
            g = self.generic_element("odd")
            c = self.poly_bracket(g, self.poly_bracket(g, g))
            cubic = c.is_zero()
            if not cubic and not witness:
                witness = "odd cubic identity [a,[a,a]] = 0 fails"
        return AxiomReport(anticommutative, jacobi, cubic, parity_ok, witness)

    # -- structural queries -------------------------------------------------------

    def center(self) -> Subspace:
        # v is central iff ad(e_i) v = 0 for every i: one stacked nullspace
        stacked = self.ad_basis.reshape(self.dim * self.dim, self.dim)
        return nullspace(stacked, self.p)

    def derived_subalgebra(self) -> Subspace:
        rows = [self.tensor[i, j] for i in range(self.dim) for j in range(i, self.dim)]
        return Subspace.from_rows(np.array(rows), self.dim, self.p)

    def is_ideal(self, s: Subspace) -> bool:
        if s.ambient_dim != self.dim:
            raise ValueError("ambient dimension mismatch")
        for i in range(self.dim):
            for row in s.basis:
                if not s.contains(self.bracket(self.basis_vector(i), row)):
                    return False
        return True

    def is_graded_subspace(self, s: Subspace) -> bool:
        """True when every RREF basis row is parity-homogeneous."""
        for row in s.basis:
            pars = set(self.parity[np.nonzero(row)[0]].tolist())
            if len(pars) > 1:
                return False
        return True

    def quotient(self, ideal: Subspace) -> "LieSuperAlgebra":
        return self.quotient_with_projection(ideal)[0]

    def quotient_with_projection(self, ideal: Subspace):
        """Quotient algebra plus the map from vectors to quotient coordinates.

        Representatives are the standard basis vectors at the non-pivot
        columns of the ideal's RREF basis, hence parity-homogeneous.
        """
        if not self.is_ideal(ideal):
            raise ValueError("subspace is not an ideal")
        if not self.is_graded_subspace(ideal):
            raise ValueError("ideal is not parity-graded")
        p = self.p
        piv = set(ideal.pivots())
        rep_cols = [c for c in range(self.dim) if c not in piv]

        def project(v) -> np.ndarray:
            return ideal.reduce(v)[rep_cols]

        names = [self.names[c] + "~" for c in rep_cols]
        parities = [int(self.parity[c]) for c in rep_cols]
        sc = {}
        for a, ca in enumerate(rep_cols):
            for b, cb in enumerate(rep_cols):
                if a > b or (a == b and parities[a] == EVEN):
                    continue
                w = project(self.tensor[ca, cb])
                terms = [(int(k), int(w[k])) for k in np.nonzero(w)[0]]
                if terms:
                    sc[(a, b)] = terms
        alg = LieSuperAlgebra(p, names, parities, sc)
        return alg, rep_cols, project

    def direct_sum(self, other: "LieSuperAlgebra") -> "LieSuperAlgebra":
        if other.p != self.p:
            raise ValueError("different primes")
        n1 = self.dim
        names = list(self.names) + list(other.names)
        parities = list(self.parity) + list(other.parity)
        sc = {k: list(v) for k, v in self.sc.items()}
        for (i, j), terms in other.sc.items():
            sc[(i + n1, j + n1)] = [(k + n1, c) for k, c in terms]
        return LieSuperAlgebra(self.p, names, parities, sc)

    def change_basis(self, rows, names=None) -> "LieSuperAlgebra":
        """Transport structure constants to the basis given by ``rows``."""
        rows = np.asarray(rows, dtype=np.int64) % self.p
        n = self.dim
        if rows.shape != (n, n):
            raise ValueError("change of basis must be square")
        r, rk, _ = rref(rows, self.p)
        if rk != n:
            raise ValueError("new basis is not invertible")
        parities = []
        for row in rows:
            pars = set(self.parity[np.nonzero(row)[0]].tolist())
            if len(pars) != 1:
                raise ValueError("new basis vector is not parity-homogeneous")
            parities.append(pars.pop())
        coords = _coordinate_solver(rows, self.p)
        names = names or [f"f{i}" for i in range(n)]
        sc = {}
        for a in range(n):
            for b in range(a, n):
                if a == b and parities[a] == EVEN:
                    continue
                w = coords(self.bracket(rows[a], rows[b]))
                terms = [(int(k), int(w[k])) for k in np.nonzero(w)[0]]
                if terms:
                    sc[(a, b)] = terms
        return LieSuperAlgebra(self.p, names, parities, sc)

    def subalgebra_on_basis(self, rows, names=None) -> "LieSuperAlgebra":
        """Algebra structure on the span of ``rows`` (must be bracket-closed)."""
        rows = np.asarray(rows, dtype=np.int64) % self.p
        k = rows.shape[0]
        span = Subspace.from_rows(rows, self.dim, self.p)
        if span.dim != k:
            raise ValueError("rows are not linearly independent")
        coords = _coordinate_solver_rect(rows, span, self.p)
        parities = []
        for row in rows:
            pars = set(self.parity[np.nonzero(row)[0]].tolist())
            if len(pars) != 1:
                raise ValueError("basis vector is not parity-homogeneous")
            parities.append(pars.pop())
        names = names or [f"f{i}" for i in range(k)]
        sc = {}
        for a in range(k):
            for b in range(a, k):
                if a == b and parities[a] == EVEN:
                    continue
                v = self.bracket(rows[a], rows[b])
                if not span.contains(v):
                    raise ValueError(f"span is not bracket-closed at pair ({a}, {b})")
                w = coords(v)
                terms = [(int(t), int(w[t])) for t in np.nonzero(w)[0]]
                if terms:
                    sc[(a, b)] = terms
        return LieSuperAlgebra(self.p, names, parities, sc)


def _coordinate_solver(rows: np.ndarray, p: int):
    """Coordinates with respect to an invertible row basis."""
    from ._kernels import rref_mod

    n = rows.shape[0]
    aug = np.hstack([rows.T % p, np.eye(n, dtype=np.int64)])
    r, rk, _ = rref_mod(aug, p)
    inv = r[:, n:]

    def coords(v):
        return (inv @ (np.asarray(v, dtype=np.int64) % p)) % p

    return coords


def _coordinate_solver_rect(rows: np.ndarray, span: Subspace, p: int):
    """Coordinates w.r.t. independent rows spanning ``span`` (not square)."""
    piv = span.pivots()
    a = rows[:, piv] % p  # rows = a @ span.basis
    ainv = _coordinate_solver(a, p)

    def coords(v):
        v = np.asarray(v, dtype=np.int64) % p
        return ainv(v[piv])

    return coords


__all__ = ["EVEN", "ODD", "AxiomReport", "LieSuperAlgebra", "parity_of"]
