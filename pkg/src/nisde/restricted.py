"""p- and p|2p-structures on Lie (super)algebras over GF(p).

A PMap stores only the images of the even basis elements.  Everything else
is derived: arbitrary even elements are evaluated by peeling basis terms in
a fixed order through the additivity rule, odd elements go through
a |-> (a^2)^[p], and all of the defining axioms are re-verified as formal
polynomial identities, not just on the basis.

The s_i(a, b) coefficient system comes from expanding (ad_{t a + b})^{p-1}(a)
in the auxiliary indeterminate t; it accepts symbolic arguments, which is
what makes the axiom checks exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import poly
from .algebra import EVEN, ODD, LieSuperAlgebra
from ._kernels import matpow_mod
from .linalg import Subspace, asmat, asvec, inv_mod, nullspace, solve


def s_coeffs(alg: LieSuperAlgebra, a, b) -> list[poly.PolyVector]:
    """The p-1 coefficients s_i(a, b) of the additivity rule.

    a, b may be concrete vectors or PolyVectors; the result is a list of
    PolyVectors (constant ones for concrete input).
    """
    p = alg.p
    fa = a if isinstance(a, poly.PolyVector) else poly.PolyVector.from_vec(asvec(a, p), p)
    fb = b if isinstance(b, poly.PolyVector) else poly.PolyVector.from_vec(asvec(b, p), p)
    t = poly.aux_var(0)
    f = fa.mul_var(t) + fb
    cur = fa
    for _ in range(p - 1):
        cur = alg.poly_bracket(f, cur)
    buckets = cur.extract_aux_coeffs(t, p - 2) if p > 1 else []
    out = []
    for i in range(1, p):
        c = buckets[i - 1] if i - 1 < len(buckets) else poly.PolyVector.zero(alg.dim, p)
        out.append(c.scale(inv_mod(i, p)))
    return out


@dataclass
class PMapReport:
    basis_clause: bool = True
    homogeneity: bool = True
    additivity: bool = True
    adjoint_identity: bool = True  # ad(a^[p]) = (ad_a)^p as a polynomial identity
    order_independent: bool = True
    witness: str = ""

    @property
    def ok(self) -> bool:
        return (
            self.basis_clause
            and self.homogeneity
            and self.additivity
            and self.adjoint_identity
            and self.order_independent
        )


class PMap:
    """p|2p-structure determined by images of the even basis elements."""

    def __init__(self, alg: LieSuperAlgebra, even_images: dict[int, np.ndarray]):
        self.alg = alg
        self.even_images = {int(j): asvec(v, alg.p) for j, v in even_images.items()}
        self._symbolic_cache: dict = {}
        if sorted(self.even_images) != alg.even_indices():
            raise ValueError("images must cover exactly the even basis elements")
        for j, v in self.even_images.items():
            if set(alg.parity[np.nonzero(v)[0]].tolist()) - {EVEN}:
                raise ValueError(f"image of even element {alg.names[j]} is not even")

    def image_poly(self, j: int) -> poly.PolyVector:
        return poly.PolyVector.from_vec(self.even_images[j], self.alg.p)


def jacobson_extend(alg: LieSuperAlgebra, images) -> PMap:
    """Construct the unique p|2p-map with the given even basis images.

    Every image must satisfy ad(f_j) = ad(e_j)^p; a violation reports the
    offending index together with the defect matrix.
    """
    p = alg.p
    if p == 2 and alg.is_super:
        raise ValueError("p = 2 superalgebra [2]-structures are out of scope here")
    imgs = {int(j): asvec(v, p) for j, v in dict(images).items()}
    for j in sorted(imgs):
        if alg.parity[j] != EVEN:
            raise ValueError(f"{alg.names[j]} is odd; only even elements carry stored images")
        lhs = matpow_mod(alg.ad(alg.basis_vector(j)), p, p)
        rhs = alg.ad(imgs[j])
        if (lhs != rhs).any():
            raise ValueError(
                f"ad(e_j)^p != ad(f_j) at j={j} ({alg.names[j]}); defect=\n{(lhs - rhs) % p}"
            )
    return PMap(alg, imgs)


def evaluate_poly(pm: PMap, f: poly.PolyVector, order=None) -> poly.PolyVector:
    """Peel basis terms of f in ascending index order (or the given order).

    Implements (c e_j + r)^[p] = c^p e_j^[p] + r^[p] + sum_i s_i(c e_j, r);
    polynomial coefficients go through the Frobenius for the c^p factor.
    """
    alg, p = pm.alg, pm.alg.p
    odd_support = [i for i in f.support() if alg.parity[i] == ODD]
    if odd_support:
        raise ValueError(
            f"p-map evaluation needs even support; odd coordinates {odd_support} present"
        )
    order = list(order) if order is not None else list(range(alg.dim))
    result = poly.PolyVector.zero(alg.dim, p)
    rest = f
    for j in order:
        if alg.parity[j] == ODD:
            continue
        c, tail = rest.split_coordinate(j)
        if not c:
            continue
        result = result + pm.image_poly(j).mul_spoly(poly.spoly_frobenius(c, p))
        if tail.is_zero():
            rest = tail
            break
        cj = poly.PolyVector(alg.dim, p, {m: _unit(alg.dim, j, v) for m, v in c.items()})
        for s in s_coeffs(alg, cj, tail):
            result = result + s
        rest = tail
    if not rest.is_zero():
        raise AssertionError("peeling did not exhaust the element")
    return result


def _unit(n: int, j: int, c: int) -> np.ndarray:
    e = np.zeros(n, dtype=np.int64)
    e[j] = c
    return e


def evaluate(pm: PMap, a) -> np.ndarray:
    f = poly.PolyVector.from_vec(asvec(a, pm.alg.p), pm.alg.p)
    return evaluate_poly(pm, f).constant()


def evaluate_symbolic(pm: PMap, block: int = 0, order=None) -> poly.PolyVector:
    key = (block, tuple(order) if order is not None else None)
    if key not in pm._symbolic_cache:
        g = pm.alg.generic_element("even", block)
        pm._symbolic_cache[key] = evaluate_poly(pm, g, order)
    return pm._symbolic_cache[key]


def evaluate_2p_poly(pm: PMap, f: poly.PolyVector) -> poly.PolyVector:
    """a |-> (a^2)^[p] on odd elements, a^2 := 2^{-1} [a, a]."""
    alg, p = pm.alg, pm.alg.p
    if p == 2:
        raise ValueError("[2p] on odd elements requires p > 2")
    even_support = [i for i in f.support() if alg.parity[i] == EVEN]
    if even_support:
        raise ValueError("[2p] expects odd support")
    asq = alg.poly_bracket(f, f).scale(inv_mod(2, p))
    return evaluate_poly(pm, asq)


def evaluate_2p(pm: PMap, a) -> np.ndarray:
    f = poly.PolyVector.from_vec(asvec(a, pm.alg.p), pm.alg.p)
    return evaluate_2p_poly(pm, f).constant()


def verify_pmap(pm: PMap) -> PMapReport:
    """Check all of the defining clauses, symbolically where they are not
    multilinear.  The basis clause alone already determines the map; the
    remaining checks guard the evaluation machinery itself."""
    alg, p = pm.alg, pm.alg.p
    rep = PMapReport()

    for j in alg.even_indices():
        lhs = matpow_mod(alg.ad(alg.basis_vector(j)), p, p)
        rhs = alg.ad(pm.even_images[j])
        if (lhs != rhs).any():
            rep.basis_clause = False
            rep.witness = f"ad clause fails on basis element {alg.names[j]}"
            return rep

    ev = evaluate_symbolic(pm)

    # ad(a^[p]) == (ad_a)^p, tested against a generic second argument
    a = alg.generic_element("even", 0)
    b = alg.generic_element("all", 1)
    lhs = alg.poly_bracket(ev, b)
    cur = b
    for _ in range(p):
        cur = alg.poly_bracket(a, cur)
    if not (lhs - cur).is_zero():
        rep.adjoint_identity = False
        rep.witness = "ad(a^[p]) != (ad_a)^p symbolically"

    # (t a)^[p] == t^p a^[p]
    t = poly.aux_var(1)
    scaled = evaluate_poly(pm, a.mul_var(t))
    expected = ev.mul_spoly({(t,) * p: 1})
    if not (scaled - expected).is_zero():
        rep.homogeneity = False
        rep.witness = "p-homogeneity fails symbolically"

    # (a+b)^[p] - a^[p] - b^[p] - sum s_i(a, b) == 0 over two blocks
    b_even = alg.generic_element("even", 1)
    total = evaluate_poly(pm, a + b_even)
    total = total - ev - evaluate_symbolic(pm, 1)
    for s in s_coeffs(alg, a, b_even):
        total = total - s
    if not total.is_zero():
        rep.additivity = False
        rep.witness = "additivity clause fails symbolically"

    rev = evaluate_symbolic(pm, 0, order=list(reversed(range(alg.dim))))
    if not (rev - ev).is_zero():
        rep.order_independent = False
        rep.witness = "peeling order changes the result"
    return rep


def is_restricted_derivation(alg: LieSuperAlgebra, pm: PMap, D) -> bool:
    return restricted_defect(alg, pm, D).is_zero()


def restricted_defect(alg: LieSuperAlgebra, pm: PMap, D) -> poly.PolyVector:
    """D(a^[p]) - (ad_a)^{p-1}(D(a)) on a generic even element.

    Basis substitution alone is insufficient: a^[p] is degree p in the
    coordinates, so the defect is a genuine polynomial identity.
    """
    p = alg.p
    D = asmat(D, p)
    a = alg.generic_element("even", 0)
    lhs = poly.apply_matrix(D, evaluate_symbolic(pm), p)
    cur = poly.apply_matrix(D, a, p)
    for _ in range(p - 1):
        cur = alg.poly_bracket(a, cur)
    return lhs - cur


@dataclass(frozen=True)
class PPropertyWitness:
    gamma: int
    a0: np.ndarray


def p_property(alg: LieSuperAlgebra, pm: PMap, D) -> PPropertyWitness | None:
    """Find gamma, a0 with D^p = gamma D + ad(a0) and D(a0) = 0.

    Scans the p candidate values of gamma in ascending order; a0 is the
    canonical solution (free variables zero) of the combined linear system,
    so reruns are reproducible.  The a0 part of the answer is only unique
    modulo the centralizer, as expected.
    """
    p, n = alg.p, alg.dim
    D = asmat(D, p)
    Dp = matpow_mod(D, p, p)
    # ad as a linear map a0 |-> ad(a0): rows indexed by flattened (k, j)
    A = alg.tensor.transpose(2, 1, 0).reshape(n * n, n)
    for gamma in range(p):
        M = (Dp - gamma * D) % p
        sys_m = np.vstack([A, D])
        sys_b = np.concatenate([M.reshape(-1), np.zeros(n, dtype=np.int64)])
        res = solve(sys_m, sys_b, p)
        if res is None:
            continue
        a0 = res[0]
        assert ((alg.ad(a0) + gamma * D - Dp) % p == 0).all()
        assert not ((D @ a0) % p).any()
        return PPropertyWitness(gamma, a0)
    return None


def is_p_ideal(alg: LieSuperAlgebra, pm: PMap, ideal: Subspace) -> bool:
    """Closure of the ideal under [p] (and [2p] on its odd part), verified
    on a generic element of the ideal."""
    if not alg.is_ideal(ideal):
        raise ValueError("subspace is not an ideal")
    if ideal.dim == 0:
        return True
    if not alg.is_graded_subspace(ideal):
        raise ValueError("ideal is not parity-graded")
    p = alg.p
    even_rows = [r for r in ideal.basis if alg.parity[np.nonzero(r)[0][0]] == EVEN]
    odd_rows = [r for r in ideal.basis if alg.parity[np.nonzero(r)[0][0]] == ODD]
    if even_rows:
        f = poly.PolyVector.zero(alg.dim, p)
        for t, row in enumerate(even_rows):
            f = f + poly.PolyVector(alg.dim, p, {(poly.var(3, t),): row})
        for v in evaluate_poly(pm, f).terms.values():
            if not ideal.contains(v):
                return False
    if odd_rows and p > 2:
        g = poly.PolyVector.zero(alg.dim, p)
        for t, row in enumerate(odd_rows):
            g = g + poly.PolyVector(alg.dim, p, {(poly.var(3, t),): row})
        for v in evaluate_2p_poly(pm, g).terms.values():
            if not ideal.contains(v):
                return False
    return True


def quotient_pmap(alg: LieSuperAlgebra, pm: PMap, ideal: Subspace):
    """Quotient algebra with the induced p-structure (a+I)^[p] = a^[p] + I."""
    if not is_p_ideal(alg, pm, ideal):
        raise ValueError("ideal is not closed under the p-map")
    qalg, rep_cols, project = alg.quotient_with_projection(ideal)
    images = {}
    for a, c in enumerate(rep_cols):
        if qalg.parity[a] == EVEN:
            images[a] = project(evaluate(pm, alg.basis_vector(c)))
    return qalg, jacobson_extend(qalg, images)


__all__ = [
    "PMap",
    "PMapReport",
    "PPropertyWitness",
    "evaluate",
    "evaluate_2p",
    "evaluate_2p_poly",
    "evaluate_poly",
    "evaluate_symbolic",
    "is_p_ideal",
    "is_restricted_derivation",
    "jacobson_extend",
    "p_property",
    "quotient_pmap",
    "restricted_defect",
    "s_coeffs",
    "verify_pmap",
]
