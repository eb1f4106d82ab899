"""Parity-graded bilinear forms and their compatibility with derivations.

A form is carried as its Gram matrix in the algebra basis.  ``nis_report``
explains *which* axiom failed and on which basis pair/triple instead of a
bare False; ``is_nis`` is the boolean wrapper.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import poly
from .algebra import EVEN, LieSuperAlgebra, parity_of
from .linalg import Subspace, asmat, nullspace, rank, rref


@dataclass(frozen=True)
class BilForm:
    parity: int
    gram: np.ndarray
    p: int

    @staticmethod
    def make(parity, gram, p: int) -> "BilForm":
        return BilForm(parity_of(parity), asmat(gram, p), p)

    def value(self, a, b) -> int:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return int((a @ self.gram @ b) % self.p)

    def pair_poly(self, f: poly.PolyVector, g: poly.PolyVector) -> poly.ScalarPoly:
        return poly.pairing(self.gram, f, g, self.p)


@dataclass
class FormReport:
    parity_compatible: bool = True
    supersymmetric: bool = True
    nondegenerate: bool = True
    invariant: bool = True
    witness: str = ""

    @property
    def ok(self) -> bool:
        return (
            self.parity_compatible
            and self.supersymmetric
            and self.nondegenerate
            and self.invariant
        )


def nis_report(alg: LieSuperAlgebra, B: BilForm) -> FormReport:
    p, n, G = alg.p, alg.dim, B.gram
    rep = FormReport()
    pi = alg.parity
    pair_par = (pi[:, None] + pi[None, :]) % 2
    bad = np.nonzero((G != 0) & (pair_par != B.parity))
    if bad[0].size:
        rep.parity_compatible = False
        i, j = int(bad[0][0]), int(bad[1][0])
        rep.witness = f"parity: B({alg.names[i]},{alg.names[j]}) != 0"
        return rep

    sign = np.where((pi[:, None] * pi[None, :]) % 2 == 1, -1, 1)
    if ((G.T - sign * G) % p).any():
        rep.supersymmetric = False
        bad = np.nonzero((G.T - sign * G) % p)
        i, j = int(bad[0][0]), int(bad[1][0])
        rep.witness = f"supersymmetry fails at ({alg.names[i]},{alg.names[j]})"
        return rep

    if rank(G, p) != n:
        rep.nondegenerate = False
        rep.witness = "Gram matrix is singular"
        return rep

    # invariance B([e_i,e_j],e_k) = B(e_i,[e_j,e_k]) is trilinear: basis suffices
    T = alg.tensor
    lhs = np.einsum("ijl,lk->ijk", T, G) % p
    rhs = np.einsum("jkl,il->ijk", T, G) % p
    if (lhs != rhs).any():
        rep.invariant = False
        w = np.argwhere(lhs != rhs)[0]
        rep.witness = (
            f"invariance fails on ({alg.names[w[0]]},{alg.names[w[1]]},{alg.names[w[2]]})"
        )
    return rep


def is_nis(alg: LieSuperAlgebra, B: BilForm) -> bool:
    return nis_report(alg, B).ok


def d_invariance_report(alg: LieSuperAlgebra, B: BilForm, D, parity_D) -> tuple[bool, str]:
    """B(D a, b) + (-1)^{p(D) p(a)} B(a, D b) = 0, with the extra quadratic
    clause B(a, D a) = 0 at p = 2 when p(D) + p(B) is even."""
    p = alg.p
    parity_D = parity_of(parity_D)
    D = asmat(D, p)
    pi = alg.parity
    # D must be parity-homogeneous of the declared parity
    bad = np.nonzero((D != 0) & (pi[:, None] != (pi[None, :] + parity_D) % 2))
    if bad[0].size:
        raise ValueError("derivation matrix is not homogeneous of the declared parity")
    sign = np.where((parity_D * pi) % 2 == 1, -1, 1)
    defect = (D.T @ B.gram + sign[:, None] * (B.gram @ D)) % p
    if defect.any():
        i, j = (int(x) for x in np.argwhere(defect)[0])
        return False, f"bilinear clause fails at ({alg.names[i]},{alg.names[j]})"
    if p == 2 and (parity_D + B.parity) % 2 == EVEN:
        a = alg.generic_element("all")
        q = B.pair_poly(a, poly.apply_matrix(D, a, p))
        if q:
            return False, "p=2 quadratic clause B(a, D(a)) = 0 fails"
    return True, ""


def is_d_invariant(alg: LieSuperAlgebra, B: BilForm, D, parity_D) -> bool:
    return d_invariance_report(alg, B, D, parity_D)[0]


def orth_complement(alg: LieSuperAlgebra, B: BilForm, s: Subspace) -> Subspace:
    """{v : B(v, s) = 0 for all s in the subspace}."""
    if not is_nis_gram_nondegenerate(B):
        raise ValueError("form is degenerate")
    if s.dim == 0:
        return Subspace.full(alg.dim, alg.p)
    rows = (s.basis @ B.gram.T) % alg.p
    return nullspace(rows, alg.p)


def is_nis_gram_nondegenerate(B: BilForm) -> bool:
    return rank(B.gram, B.p) == B.gram.shape[0]


def invariant_forms(alg: LieSuperAlgebra, parity) -> Subspace:
    """All supersymmetric invariant forms of the given parity, as a subspace
    of flattened Gram matrices.

    Starts from the explicit supersymmetric parity-compatible generators and
    refines by the invariance constraints one basis row of ad at a time; each
    step is a small dense nullspace, which keeps the dim-52 vectorial case
    tractable.
    """
    p, n = alg.p, alg.dim
    parity = parity_of(parity)
    pi = alg.parity
    gens = []
    for i in range(n):
        for j in range(i, n):
            if (pi[i] + pi[j]) % 2 != parity:
                continue
            g = np.zeros((n, n), dtype=np.int64)
            if i == j:
                if pi[i] and p != 2:
                    continue  # B(a,a) = -B(a,a) forces 0 on odd diagonal
                g[i, i] = 1
            else:
                g[i, j] = 1
                g[j, i] = (-1) % p if (pi[i] and pi[j]) else 1
            gens.append(g.reshape(-1))
    if not gens:
        return Subspace.zero(n * n, p)
    basis = np.array(gens, dtype=np.int64)
    T = alg.tensor
    for i in range(n):
        if basis.shape[0] == 0:
            break
        Gs = basis.reshape(-1, n, n)
        d1 = np.einsum("jl,blk->bjk", T[i], Gs) % p
        d2 = np.einsum("jkl,bl->bjk", T, Gs[:, i, :]) % p
        defect = ((d1 - d2) % p).reshape(basis.shape[0], -1)
        combo = nullspace(defect.T, p)
        basis = (combo.basis @ basis) % p
    return Subspace.from_rows(basis, n * n, p)


__all__ = [
    "BilForm",
    "FormReport",
    "d_invariance_report",
    "invariant_forms",
    "is_d_invariant",
    "is_nis",
    "nis_report",
    "orth_complement",
]
