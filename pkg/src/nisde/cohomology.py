"""Chevalley-Eilenberg cohomology of Lie superalgebras over GF(p), k <= 3.

Cochains are super-alternating multilinear maps, coordinatized by their
values on canonical basis tuples: strictly increasing even indices merged
with weakly increasing odd indices.  Symmetric odd slots are handled
multiset-wise, so no factorial is ever divided out and characteristic 3 is
safe even with repeated odd entries.

Derivation spaces are solved independently of the cochain complex; the
equality dim H^1(adjoint) == dim out is used as a cross-check between the
two code paths rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import poly
from .algebra import EVEN, ODD, LieSuperAlgebra
from .linalg import Subspace, asmat, nullspace, quotient_basis, rank, rref, subspace_intersection
from .restricted import PMap, restricted_defect

DEFAULT_SIZE_GUARD = 50_000


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------

def derivations(alg: LieSuperAlgebra, parity: int | None = None,
                size_guard: int = DEFAULT_SIZE_GUARD) -> Subspace:
    """Solution space of D[e_i,e_j] = [De_i,e_j] + (-1)^{p(D)p(e_i)}[e_i,De_j],
    inside flattened matrix space (row-major D[k, i])."""
    if parity is None:
        even = derivations(alg, EVEN, size_guard)
        odd = derivations(alg, ODD, size_guard)
        return Subspace.from_rows(
            np.vstack([even.basis, odd.basis]), alg.dim * alg.dim, alg.p
        )
    n, p, T = alg.dim, alg.p, alg.tensor
    if n * n * n * n > size_guard * 64:
        raise ValueError(f"derivation solve for dim {n} exceeds the size guard")
    pairs = [(i, j) for i in range(n) for j in range(i, n)
             if i < j or alg.parity[i] == ODD]
    rows = np.zeros((len(pairs) * n, n * n), dtype=np.int64)
    for r, (i, j) in enumerate(pairs):
        sign = -1 if (parity and alg.parity[i]) else 1
        # unknown D[k, s] at flat index k*n+s
        for m in range(n):
            row = rows[r * n + m]
            # D([e_i,e_j])_m = sum_k T[i,j,k] D[m,k]
            for k in range(n):
                if T[i, j, k]:
                    row[m * n + k] = (row[m * n + k] + T[i, j, k]) % p
            # -[D e_i, e_j]_m = -sum_k D[k,i] T[k,j,m]
            for k in range(n):
                if T[k, j, m]:
                    row[k * n + i] = (row[k * n + i] - T[k, j, m]) % p
            # -sign [e_i, D e_j]_m = -sign sum_k D[k,j] T[i,k,m]
            for k in range(n):
                if T[i, k, m]:
                    row[k * n + j] = (row[k * n + j] - sign * T[i, k, m]) % p
    sol = nullspace(rows, p)
    # restrict to the requested parity block of matrix space
    mask_rows = []
    pi = alg.parity
    for k in range(n):
        for s in range(n):
            if (pi[k] + pi[s]) % 2 != parity:
                e = np.zeros(n * n, dtype=np.int64)
                e[k * n + s] = 1
                mask_rows.append(e)
    if mask_rows:
        block = nullspace(np.array(mask_rows), p)
        sol = subspace_intersection(sol, block)
    return sol


def inner_derivations(alg: LieSuperAlgebra, parity: int | None = None) -> Subspace:
    idx = range(alg.dim) if parity is None else [
        i for i in range(alg.dim) if alg.parity[i] == parity
    ]
    rows = [alg.ad(alg.basis_vector(i)).reshape(-1) for i in idx]
    if not rows:
        return Subspace.zero(alg.dim * alg.dim, alg.p)
    return Subspace.from_rows(np.array(rows), alg.dim * alg.dim, alg.p)


def out_dim(alg: LieSuperAlgebra, size_guard: int = DEFAULT_SIZE_GUARD) -> tuple[int, int]:
    dims = []
    for parity in (EVEN, ODD):
        der = derivations(alg, parity, size_guard)
        inner = inner_derivations(alg, parity)
        dims.append(der.dim - inner.dim)
    return tuple(dims)


def restricted_derivations(alg: LieSuperAlgebra, pm: PMap, parity: int | None = None,
                           size_guard: int = DEFAULT_SIZE_GUARD) -> Subspace:
    """Derivations additionally satisfying D(a^[p]) = (ad_a)^{p-1} D(a).

    The defect is linear in D, so the symbolic defect of each derivation
    basis element yields linear constraints on the coefficients.
    """
    der = derivations(alg, parity, size_guard)
    if der.dim == 0:
        return der
    n, p = alg.dim, alg.p
    defects = [restricted_defect(alg, pm, b.reshape(n, n)) for b in der.basis]
    monomials = sorted({m for d in defects for m in d.terms})
    if not monomials:
        return der
    rows = np.zeros((len(monomials) * n, der.dim), dtype=np.int64)
    for c, d in enumerate(defects):
        for mi, m in enumerate(monomials):
            if m in d.terms:
                rows[mi * n: (mi + 1) * n, c] = d.terms[m]
    combo = nullspace(rows, p)
    return Subspace.from_rows((combo.basis @ der.basis) % p, n * n, p)


def restricted_h1_dim(alg: LieSuperAlgebra, pm: PMap,
                      size_guard: int = DEFAULT_SIZE_GUARD) -> tuple[int, int]:
    dims = []
    for parity in (EVEN, ODD):
        der = restricted_derivations(alg, pm, parity, size_guard)
        inner = inner_derivations(alg, parity)
        dims.append(der.dim - inner.dim)
    return tuple(dims)


# ---------------------------------------------------------------------------
# the cochain complex
# ---------------------------------------------------------------------------

def cochain_basis(alg: LieSuperAlgebra, k: int) -> list[tuple[int, ...]]:
    """Canonical k-tuples: even indices strict, odd indices weak."""
    if k == 0:
        return [()]
    out = []

    def extend(prefix, start):
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        for i in range(start, alg.dim):
            if prefix and prefix[-1] == i and alg.parity[i] == EVEN:
                continue
            extend(prefix + [i], i)

    extend([], 0)
    return out


def _sort_tuple(alg: LieSuperAlgebra, tup):
    """Sort a basis tuple to canonical order, tracking the super sign.

    Swapping adjacent a, b contributes -(-1)^{p(a)p(b)}; a repeated even
    index kills the cochain.
    """
    t = list(tup)
    sign = 1
    for i in range(1, len(t)):
        j = i
        while j > 0 and t[j - 1] > t[j]:
            s = -1 if (alg.parity[t[j - 1]] and alg.parity[t[j]]) else 1
            sign = (-sign) * s
            t[j - 1], t[j] = t[j], t[j - 1]
            j -= 1
    for i in range(1, len(t)):
        if t[i - 1] == t[i] and alg.parity[t[i]] == EVEN:
            return None, 0
    return tuple(t), sign


@dataclass
class CochainComplexPiece:
    """Matrix of d: C^k -> C^{k+1} together with both bases."""

    k: int
    basis_k: list
    basis_k1: list
    matrix: np.ndarray  # shape (dim C^{k+1} * target, dim C^k * target)
    target_dim: int


def _tuple_parity(alg, tup) -> int:
    return int(sum(alg.parity[i] for i in tup) % 2)


def differential(alg: LieSuperAlgebra, k: int, coefficients: str = "trivial",
                 size_guard: int = DEFAULT_SIZE_GUARD) -> CochainComplexPiece:
    """Assemble d_k: C^k -> C^{k+1} as a sparse-built dense matrix.

    For a cochain w and x_1, ..., x_{k+1}:

      (dw)(x_1..x_{k+1}) =
          sum_{i<j} (-1)^{i+j} K_ij w([x_i,x_j], ..no i,j..)
        + [adjoint only] sum_i (-1)^{i+1} K_i x_i . w(..no i..)

    where the K's are the Koszul signs of moving x_i (and x_j) to the
    front, and the action term carries (-1)^{p(x_i) p(w)}.
    """
    if coefficients not in ("trivial", "adjoint"):
        raise ValueError("coefficients must be 'trivial' or 'adjoint'")
    p = alg.p
    n = alg.dim
    tgt = 1 if coefficients == "trivial" else n
    basis_k = cochain_basis(alg, k)
    basis_k1 = cochain_basis(alg, k + 1)
    if max(len(basis_k), len(basis_k1)) * tgt > size_guard:
        raise ValueError(
            f"cochain space of dim {max(len(basis_k), len(basis_k1)) * tgt} exceeds the size guard"
        )
    col_of = {tup: a for a, tup in enumerate(basis_k)}
    pi = alg.parity
    T = alg.tensor
    d = np.zeros((len(basis_k1) * tgt, len(basis_k) * tgt), dtype=np.int64)

    for rj, J in enumerate(basis_k1):
        kk = len(J)
        for a in range(kk):
            for b in range(a + 1, kk):
                # Koszul: move x_a then x_b to the front
                koszul = sum(pi[J[c]] for c in range(a)) * pi[J[a]]
                koszul += (sum(pi[J[c]] for c in range(b)) - pi[J[a]]) * pi[J[b]]
                koszul += pi[J[a]] * pi[J[b]]
                sgn = (-1) ** (a + b + koszul)
                rest = tuple(J[c] for c in range(kk) if c not in (a, b))
                for m in np.nonzero(T[J[a], J[b]])[0]:
                    coeff = int(T[J[a], J[b], m]) * sgn
                    srt, s2 = _sort_tuple(alg, (int(m),) + rest)
                    if s2 == 0 or srt not in col_of:
                        if srt is not None and srt not in col_of:
                            raise AssertionError("non-canonical tuple escaped")
                        continue
                    col = col_of[srt]
                    for t in range(tgt):
                        d[rj * tgt + t, col * tgt + t] = (
                            d[rj * tgt + t, col * tgt + t] + coeff * s2
                        ) % p
            if coefficients == "adjoint":
                koszul_i = sum(pi[J[c]] for c in range(a)) * pi[J[a]]
                rest = tuple(J[c] for c in range(kk) if c != a)
                srt, s2 = _sort_tuple(alg, rest)
                if s2 == 0:
                    continue
                col = col_of[srt]
                # action: (x_a . v)_m = sum_t v_t T[J[a], t, m]; the sign sees
                # the parity of the cochain (tuple parity + target parity)
                for t in range(n):
                    pw = (_tuple_parity(alg, srt) + pi[t]) % 2
                    sgn = (-1) ** (a + koszul_i + pi[J[a]] * pw)
                    for m in np.nonzero(T[J[a], t])[0]:
                        d[rj * tgt + int(m), col * tgt + t] = (
                            d[rj * tgt + int(m), col * tgt + t]
                            + sgn * s2 * int(T[J[a], t, m])
                        ) % p
    return CochainComplexPiece(k, basis_k, basis_k1, d % p, tgt)


@dataclass
class CohomologyResult:
    dim: int
    dim_even: int
    dim_odd: int
    representatives: list[np.ndarray]
    dim_unrefined: int | None = None  # plain CE kernel, before the char-3 clause


def _cochain_parities(alg, basis, tgt):
    pars = []
    for tup in basis:
        base = _tuple_parity(alg, tup)
        if tgt == 1:
            pars.append(base)
        else:
            pars.extend((base + int(alg.parity[t])) % 2 for t in range(tgt))
    return np.array(pars, dtype=np.int64)


def h_k(alg: LieSuperAlgebra, k: int, coefficients: str = "trivial",
        size_guard: int = DEFAULT_SIZE_GUARD) -> CohomologyResult:
    """dim ker d_k - dim im d_{k-1}, with parity split and representatives.

    For p = 3 superalgebras in degree 2 with trivial coefficients, a
    2-cocycle only defines a central extension in the characteristic-3
    category when additionally w(a, [a,a]) = 0 for all odd a (the clause
    is not implied by the cocycle identity at p = 3 and every coboundary
    satisfies it); the kernel is refined accordingly and the plain CE
    dimension is reported as dim_unrefined.
    """
    if k < 1 or k > 3:
        raise ValueError("only degrees 1..3 are supported")
    p = alg.p
    dk = differential(alg, k, coefficients, size_guard)
    ker = nullspace(dk.matrix, p)
    dim_unrefined = None
    if k == 2 and coefficients == "trivial" and p == 3 and alg.is_super:
        refined = subspace_intersection(ker, _char3_admissible_2cochains(alg))
        if refined.dim != ker.dim:
            dim_unrefined = ker.dim
        ker = refined
    if k == 1 and coefficients == "trivial":
        prev = Subspace.zero(len(dk.basis_k) * dk.target_dim, p)
    else:
        dk1 = differential(alg, k - 1, coefficients, size_guard)
        prev = Subspace.from_rows(dk1.matrix.T, dk1.matrix.shape[0], p)
    assert ker.contains_subspace(prev), "d o d != 0"
    reps = quotient_basis(ker, prev)
    pars = _cochain_parities(alg, dk.basis_k, dk.target_dim)
    d_even = d_odd = 0
    for parity in (EVEN, ODD):
        mask = np.array([i for i in range(len(pars)) if pars[i] != parity], dtype=np.int64)
        rows = []
        if mask.size:
            e = np.zeros((mask.size, len(pars)), dtype=np.int64)
            e[np.arange(mask.size), mask] = 1
            block = nullspace(e, p)
        else:
            block = Subspace.full(len(pars), p)
        kb = subspace_intersection(ker, block)
        pb = subspace_intersection(prev, block)
        if parity == EVEN:
            d_even = kb.dim - pb.dim
        else:
            d_odd = kb.dim - pb.dim
    assert d_even + d_odd == ker.dim - prev.dim
    if dim_unrefined is not None:
        dim_unrefined -= prev.dim
    return CohomologyResult(ker.dim - prev.dim, d_even, d_odd, reps, dim_unrefined)


def _char3_admissible_2cochains(alg: LieSuperAlgebra) -> Subspace:
    """2-cochains with w(a, [a,a]) = 0 for a generic odd a, as linear
    constraints on the canonical coordinates."""
    p = alg.p
    basis = cochain_basis(alg, 2)
    g = alg.generic_element("odd")
    gg = alg.poly_bracket(g, g)
    rows_by_mono: dict = {}
    for col, I in enumerate(basis):
        w = np.zeros((alg.dim, alg.dim), dtype=np.int64)
        for i in range(alg.dim):
            for j in range(alg.dim):
                srt, s = _sort_tuple(alg, (i, j))
                if s and srt == I:
                    w[i, j] = s % p
        q = poly.pairing(w, g, gg, p)
        for m, c in q.items():
            rows_by_mono.setdefault(m, np.zeros(len(basis), dtype=np.int64))
            rows_by_mono[m][col] = c
    if not rows_by_mono:
        return Subspace.full(len(basis), p)
    return nullspace(np.array(list(rows_by_mono.values())), p)


def central_extension_2cocycle_check(alg: LieSuperAlgebra, omega, parity) -> dict:
    """Antisymmetry, the 2-cocycle identity, and (p=3 only) the odd cubic
    clause w(a, [a,a]) = 0, the last one symbolically."""
    from .algebra import parity_of

    p = alg.p
    parity = parity_of(parity)
    omega = asmat(omega, p)
    pi = alg.parity
    res = {"antisymmetric": True, "cocycle": True, "cubic": None}

    sign = np.where((pi[:, None] * pi[None, :]) % 2 == 1, 1, -1)
    if ((omega.T - sign * omega) % p).any():
        res["antisymmetric"] = False
    if any(omega[i, i] % p for i in alg.even_indices()):
        res["antisymmetric"] = False

    T = alg.tensor
    # w(e_i, [e_j, e_k]) - w([e_i,e_j], e_k) - (-1)^{p_i p_j} w(e_j, [e_i,e_k])
    lhs = np.einsum("jkl,il->ijk", T, omega) % p
    r1 = np.einsum("ijl,lk->ijk", T, omega) % p
    koszul = np.where((pi[:, None] * pi[None, :]) % 2 == 1, -1, 1)
    r2 = np.einsum("ikl,jl->ijk", T, omega) % p
    defect = (lhs - r1 - koszul[:, :, None] * r2) % p
    if defect.any():
        res["cocycle"] = False

    if p == 3 and alg.is_super:
        g = alg.generic_element("odd")
        val = poly.pairing(omega, g, alg.poly_bracket(g, g), p)
        res["cubic"] = not val
    return res


__all__ = [
    "CochainComplexPiece",
    "CohomologyResult",
    "central_extension_2cocycle_check",
    "cochain_basis",
    "derivations",
    "differential",
    "h_k",
    "inner_derivations",
    "out_dim",
    "restricted_derivations",
    "restricted_h1_dim",
]
