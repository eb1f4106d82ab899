"""Vector-valued multivariate polynomials over GF(p).

These are the medium for every identity check that is not multilinear:
p-map axioms, restricted-derivation defects, quadratic and cubic side
conditions.  An identity verified as a formal polynomial identity over
GF(p)[lambda_1, ..., lambda_n] holds over every extension field, which is
what a "for all a" statement over an arbitrary field of characteristic p
amounts to.

Conventions:

* Indeterminates are integer ids.  ``var(block, i)`` gives the i-th
  indeterminate of a disjoint block (block 0 renders as ``l<i>``, block 1
  as ``m<i>``, ...).  ``aux_var(j)`` gives auxiliary indeterminates (t,
  t1, ...) used for coefficient extraction; they have negative ids.
* A monomial is a sorted tuple of ids with repetition, () meaning 1.
* A PolyVector of dimension n stores a dict monomial -> int64 coefficient
  vector of length n; scalar polynomials are plain dicts monomial -> int.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 1 << 14  # indeterminates per block; dims stay well below this

Monomial = tuple
ScalarPoly = dict


def var(block: int, i: int) -> int:
    if i >= _BLOCK:
        raise ValueError("index exceeds block size")
    return block * _BLOCK + i


def aux_var(j: int = 0) -> int:
    return -1 - j


def var_name(v: int) -> str:
    if v < 0:
        return "t" if v == -1 else f"t{-v - 1}"
    block, i = divmod(v, _BLOCK)
    prefix = "lmnrsu"[block] if block < 6 else f"b{block}_"
    return f"{prefix}{i}"


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    return tuple(sorted(m1 + m2))


def mono_str(m: Monomial) -> str:
    if not m:
        return "1"
    out = []
    for v in sorted(set(m)):
        e = m.count(v)
        out.append(var_name(v) + (f"^{e}" if e > 1 else ""))
    return "*".join(out)


# ---------------------------------------------------------------------------
# scalar polynomials
# ---------------------------------------------------------------------------

def spoly_add(a: ScalarPoly, b: ScalarPoly, p: int) -> ScalarPoly:
    out = dict(a)
    for m, c in b.items():
        v = (out.get(m, 0) + c) % p
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def spoly_scale(a: ScalarPoly, c: int, p: int) -> ScalarPoly:
    c %= p
    if c == 0:
        return {}
    return {m: (v * c) % p for m, v in a.items()}


def spoly_mul(a: ScalarPoly, b: ScalarPoly, p: int) -> ScalarPoly:
    out: ScalarPoly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = mono_mul(m1, m2)
            v = (out.get(m, 0) + c1 * c2) % p
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def spoly_frobenius(a: ScalarPoly, p: int) -> ScalarPoly:
    """a**p for a scalar polynomial: Frobenius plus Fermat on coefficients."""
    return {tuple(sorted(m * p)): c for m, c in a.items()}


class PolyVector:
    """Polynomial with coefficients in GF(p)^n, stored sparsely by monomial."""

    __slots__ = ("n", "p", "terms")

    def __init__(self, n: int, p: int, terms: dict | None = None):
        self.n = n
        self.p = p
        self.terms: dict[Monomial, np.ndarray] = {}
        if terms:
            for m, v in terms.items():
                v = np.asarray(v, dtype=np.int64) % p
                if v.any():
                    self.terms[m] = v

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(n: int, p: int) -> "PolyVector":
        return PolyVector(n, p)

    @staticmethod
    def from_vec(v, p: int) -> "PolyVector":
        v = np.asarray(v, dtype=np.int64) % p
        return PolyVector(v.shape[0], p, {(): v})

    @staticmethod
    def generic(n: int, p: int, indices, block: int = 0) -> "PolyVector":
        """sum_i lambda_i e_i over the given basis indices."""
        out = PolyVector(n, p)
        for i in indices:
            e = np.zeros(n, dtype=np.int64)
            e[i] = 1
            out.terms[(var(block, i),)] = e
        return out

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def constant(self) -> np.ndarray:
        """The value when the polynomial has no indeterminates."""
        if not self.terms:
            return np.zeros(self.n, dtype=np.int64)
        if set(self.terms) != {()}:
            raise ValueError("polynomial is not constant")
        return self.terms[()].copy()

    def copy(self) -> "PolyVector":
        return PolyVector(self.n, self.p, {m: v.copy() for m, v in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return "PolyVector(0)"
        bits = [f"{mono_str(m)}*{v.tolist()}" for m, v in sorted(self.terms.items())]
        return "PolyVector(" + " + ".join(bits) + ")"

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "PolyVector") -> "PolyVector":
        out = self.copy()
        for m, v in other.terms.items():
            w = (out.terms.get(m, 0) + v) % self.p
            if isinstance(w, np.ndarray) and w.any():
                out.terms[m] = w
            else:
                out.terms.pop(m, None)
        return out

    def __sub__(self, other: "PolyVector") -> "PolyVector":
        return self + other.scale(-1)

    def scale(self, c: int) -> "PolyVector":
        c %= self.p
        return PolyVector(self.n, self.p, {m: (v * c) % self.p for m, v in self.terms.items()})

    def mul_spoly(self, s: ScalarPoly) -> "PolyVector":
        out = PolyVector(self.n, self.p)
        for m1, c in s.items():
            for m2, v in self.terms.items():
                m = mono_mul(m1, m2)
                w = (out.terms.get(m, 0) + c * v) % self.p
                if isinstance(w, np.ndarray) and w.any():
                    out.terms[m] = w
                else:
                    out.terms.pop(m, None)
        return out

    def mul_var(self, v: int) -> "PolyVector":
        return PolyVector(self.n, self.p, {mono_mul(m, (v,)): c for m, c in self.terms.items()})

    # -- coordinate access ----------------------------------------------------

    def coeff_spoly(self, j: int) -> ScalarPoly:
        """Scalar polynomial multiplying basis coordinate j."""
        return {m: int(v[j]) for m, v in self.terms.items() if v[j]}

    def split_coordinate(self, j: int) -> tuple[ScalarPoly, "PolyVector"]:
        """(coefficient of e_j, remainder with coordinate j zeroed)."""
        coeff: ScalarPoly = {}
        rest = PolyVector(self.n, self.p)
        for m, v in self.terms.items():
            if v[j]:
                coeff[m] = int(v[j])
                w = v.copy()
                w[j] = 0
                if w.any():
                    rest.terms[m] = w
            else:
                rest.terms[m] = v.copy()
        return coeff, rest

    def support(self) -> np.ndarray:
        """Basis coordinates that appear with a nonzero coefficient."""
        mask = np.zeros(self.n, dtype=bool)
        for v in self.terms.values():
            mask |= v != 0
        return np.nonzero(mask)[0]

    # -- substitution and extraction ------------------------------------------

    def substitute(self, values: dict[int, int]) -> "PolyVector":
        """Substitute concrete GF(p) values for some indeterminates."""
        out = PolyVector(self.n, self.p)
        for m, v in self.terms.items():
            c = 1
            rest = []
            for x in m:
                if x in values:
                    c = (c * values[x]) % self.p
                else:
                    rest.append(x)
            if c == 0:
                continue
            key = tuple(rest)
            w = (out.terms.get(key, 0) + c * v) % self.p
            if isinstance(w, np.ndarray) and w.any():
                out.terms[key] = w
            else:
                out.terms.pop(key, None)
        return out

    def extract_aux_coeffs(self, aux: int, max_deg: int) -> list["PolyVector"]:
        """Coefficients of aux^0, ..., aux^max_deg (aux removed from keys)."""
        buckets = [PolyVector(self.n, self.p) for _ in range(max_deg + 1)]
        for m, v in self.terms.items():
            d = m.count(aux)
            if d > max_deg:
                raise ValueError(f"degree {d} in {var_name(aux)} exceeds max_deg={max_deg}")
            key = tuple(x for x in m if x != aux)
            b = buckets[d]
            w = (b.terms.get(key, 0) + v) % self.p
            if isinstance(w, np.ndarray) and w.any():
                b.terms[key] = w
            else:
                b.terms.pop(key, None)
        return buckets

    def max_total_degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)


def spoly_from_polyvector(f: PolyVector) -> ScalarPoly:
    """Read a 1-dimensional PolyVector back as a scalar polynomial."""
    if f.n != 1:
        raise ValueError("expected dimension-1 PolyVector")
    return {m: int(v[0]) for m, v in f.terms.items()}


def polyvector_from_spoly(s: ScalarPoly, p: int) -> PolyVector:
    return PolyVector(1, p, {m: np.array([c], dtype=np.int64) for m, c in s.items()})


# ---------------------------------------------------------------------------
# batched bilinear maps
# ---------------------------------------------------------------------------

def _stack(f: PolyVector):
    keys = list(f.terms.keys())
    if not keys:
        return [], np.zeros((0, f.n), dtype=np.int64)
    return keys, np.stack([f.terms[k] for k in keys])


def bilinear_map(tensor: np.ndarray, f: PolyVector, g: PolyVector, p: int,
                 out_dim: int | None = None) -> PolyVector:
    """Apply the bilinear map given by ``tensor[i,j,k]`` to two PolyVectors.

    Works monomial-by-monomial; the inner contraction is numpy, chunked so
    that cases with tens of thousands of monomial pairs stay in memory.
    """
    n_out = tensor.shape[2] if out_dim is None else out_dim
    out = PolyVector(n_out, p)
    kf, F = _stack(f)
    kg, G = _stack(g)
    if not kf or not kg:
        return out
    # C[a, j, k] = sum_i F[a, i] tensor[i, j, k]
    nj, nk = tensor.shape[1], tensor.shape[2]
    C = (F @ tensor.reshape(tensor.shape[0], nj * nk)).reshape(len(kf), nj, nk) % p
    chunk = max(1, 2_000_000 // max(1, len(kg) * nk))
    for a0 in range(0, len(kf), chunk):
        a1 = min(a0 + chunk, len(kf))
        # prod[a, b, k] = sum_j G[b, j] C[a, j, k]
        prod = np.matmul(G[None, :, :], C[a0:a1]) % p
        nz_a, nz_b = np.nonzero(prod.any(axis=2))
        for a, b in zip(nz_a.tolist(), nz_b.tolist()):
            m = mono_mul(kf[a0 + a], kg[b])
            w = (out.terms.get(m, 0) + prod[a, b]) % p
            if isinstance(w, np.ndarray) and w.any():
                out.terms[m] = w
            else:
                out.terms.pop(m, None)
    return out


def pairing(gram: np.ndarray, f: PolyVector, g: PolyVector, p: int) -> ScalarPoly:
    """Scalar polynomial B(f, g) for a Gram matrix B."""
    kf, F = _stack(f)
    kg, G = _stack(g)
    out: ScalarPoly = {}
    if not kf or not kg:
        return out
    vals = (F @ gram @ G.T) % p
    for a, b in zip(*np.nonzero(vals)):
        m = mono_mul(kf[a], kg[b])
        v = (out.get(m, 0) + int(vals[a, b])) % p
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def apply_matrix(mat: np.ndarray, f: PolyVector, p: int) -> PolyVector:
    """Linear map applied coefficient-wise: f |-> mat @ f."""
    out = PolyVector(mat.shape[0], p)
    for m, v in f.terms.items():
        w = (mat @ v) % p
        if w.any():
            out.terms[m] = w
    return out


__all__ = [
    "Monomial",
    "PolyVector",
    "ScalarPoly",
    "apply_matrix",
    "aux_var",
    "bilinear_map",
    "mono_mul",
    "mono_str",
    "pairing",
    "polyvector_from_spoly",
    "spoly_add",
    "spoly_frobenius",
    "spoly_from_polyvector",
    "spoly_mul",
    "spoly_scale",
    "var",
    "var_name",
]
