"""Builders for the worked example algebras, their forms, p-maps, named
derivations and the degree-p forms that feed the extension engine.

Basis names follow the sources the fixtures come from (x1, y1, p, q, z*,
...), so failed checks print in the notation the reference tables use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .algebra import EVEN, ODD, LieSuperAlgebra
from .divided import (
    DividedPowerAlgebra,
    build_vect,
    field_operator,
    hamiltonian_pair_field,
    monomial_field,
    operator_to_field,
    svect1_basis,
)
from .forms import BilForm, invariant_forms, is_nis
from .linalg import Subspace, check_prime, inv_mod, rref
from ._kernels import matpow_mod, rref_mod
from .restricted import PMap, jacobson_extend, quotient_pmap
from .dext import CubicForm


# ---------------------------------------------------------------------------
# matrix-algebra scaffolding
# ---------------------------------------------------------------------------

def algebra_from_matrices(p, mats, names, parities):
    """Lie superalgebra on a list of (super)matrices under the graded
    commutator [A,B] = AB - (-1)^{p(A)p(B)} BA.  Returns the algebra and
    the coordinate map (matrix -> basis coordinates)."""
    check_prime(p)
    mats = [np.asarray(m, dtype=np.int64) % p for m in mats]
    k = len(mats)
    flat = np.array([m.reshape(-1) for m in mats], dtype=np.int64)
    span = Subspace.from_rows(flat, flat.shape[1], p)
    if span.dim != k:
        raise ValueError("matrices are not linearly independent")
    from .algebra import _coordinate_solver_rect, parity_of

    coords = _coordinate_solver_rect(flat, span, p)
    par = [parity_of(x) for x in parities]
    sc = {}
    for a in range(k):
        for b in range(a, k):
            if a == b and par[a] == EVEN:
                continue
            sign = -1 if (par[a] and par[b]) else 1
            w = (mats[a] @ mats[b] - sign * mats[b] @ mats[a]) % p
            c = coords(w.reshape(-1))
            terms = [(int(t), int(c[t])) for t in np.nonzero(c)[0]]
            if terms:
                sc[(a, b)] = terms
    return LieSuperAlgebra(p, names, parities, sc), mats, coords


def _matrix_pmap_images(alg, mats, coords, p):
    images = {}
    for j in alg.even_indices():
        images[j] = coords(matpow_mod(mats[j], p, p).reshape(-1))
    return images


def build_gl(n: int, p: int):
    names, mats = [], []
    for i in range(n):
        for j in range(n):
            names.append(f"E{i + 1}{j + 1}")
            m = np.zeros((n, n), dtype=np.int64)
            m[i, j] = 1
            mats.append(m)
    alg, mats, coords = algebra_from_matrices(p, mats, names, ["even"] * len(mats))
    return alg, jacobson_extend(alg, _matrix_pmap_images(alg, mats, coords, p))


def build_sl(n: int, p: int):
    names, mats = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                names.append(f"E{i + 1}{j + 1}")
                m = np.zeros((n, n), dtype=np.int64)
                m[i, j] = 1
                mats.append(m)
    for i in range(n - 1):
        names.append(f"h{i + 1}")
        m = np.zeros((n, n), dtype=np.int64)
        m[i, i], m[i + 1, i + 1] = 1, -1
        mats.append(m)
    alg, mats, coords = algebra_from_matrices(p, mats, names, ["even"] * len(mats))
    return alg, jacobson_extend(alg, _matrix_pmap_images(alg, mats, coords, p))


def build_psl3(p: int = 3):
    """psl(3) at p = 3 in the root-vector basis e1 = [x1,y1], e2 = x1,
    e3 = x2, e4 = x3, e5 = y1, e6 = y2, e7 = y3."""
    if p != 3:
        raise ValueError("psl(3) needs p = 3 (p must divide n)")
    E = lambda i, j: _unit_mat(3, i, j)
    # order: h2 first so the quotient by the identity keeps h1, x's, y's
    mats = [
        E(1, 1) - E(2, 2),          # h2
        E(0, 0) - E(1, 1),          # h1
        E(0, 1), E(1, 2), E(0, 2),  # x1, x2, x3 = [x1, x2]
        E(1, 0), E(2, 1), -E(2, 0), # y1, y2, y3 = [y1, y2]
    ]
    names = ["h2", "h1", "x1", "x2", "x3", "y1", "y2", "y3"]
    sl3, mats, coords = algebra_from_matrices(p, mats, names, ["even"] * 8)
    pm = jacobson_extend(sl3, _matrix_pmap_images(sl3, mats, coords, p))
    centre = sl3.center()
    assert centre.dim == 1
    qalg, qpm = quotient_pmap(sl3, pm, centre)
    names = [f"e{i}" for i in range(1, 8)]
    alg = LieSuperAlgebra(p, names, ["even"] * 7, qalg.sc)
    pmap = jacobson_extend(alg, qpm.even_images)
    return alg, pmap


def psl3_gram(p: int = 3) -> BilForm:
    g = np.zeros((7, 7), dtype=np.int64)
    g[0, 0] = -1
    for a, b, c in ((1, 4, 1), (2, 5, 1), (3, 6, -1)):
        g[a, b] = c
        g[b, a] = c
    return BilForm.make("even", g, p)


def _unit_mat(n, i, j):
    m = np.zeros((n, n), dtype=np.int64)
    m[i, j] = 1
    return m


# ---------------------------------------------------------------------------
# Heisenberg and its Manin triple
# ---------------------------------------------------------------------------

def build_hei(p: int, n: int = 1, z_square_z: bool = True):
    """hei(2n): [c_i, a_i] = z.  The 2-structure sends every generator to
    zero except possibly z; both z^[2] = z and z^[2] = 0 are admissible and
    callers choose (the worked examples need both variants)."""
    names = [f"p{i + 1}" for i in range(n)] + [f"q{i + 1}" for i in range(n)] + ["z"]
    if n == 1:
        names = ["p", "q", "z"]
    sc = {(i, n + i): [(2 * n, 1)] for i in range(n)}
    alg = LieSuperAlgebra(p, names, ["even"] * (2 * n + 1), sc)
    images = {j: np.zeros(2 * n + 1, dtype=np.int64) for j in range(2 * n + 1)}
    if z_square_z:
        images[2 * n][2 * n] = 1
    return alg, jacobson_extend(alg, images)


def build_manin_double(h: LieSuperAlgebra, pm_h: PMap):
    """h + h* with the coadjoint bracket, the squaring induced from h, and
    the canonical pairing; this construction is a 2-structure (p = 2)."""
    p = h.p
    if p != 2:
        raise ValueError("the Manin-double squaring is a p = 2 construction")
    if h.is_super:
        raise ValueError("base of the Manin double must be a Lie algebra")
    n = h.dim
    names = list(h.names) + [f"{x}*" for x in h.names]
    sc = {}
    for (i, j), terms in h.sc.items():
        sc[(i, j)] = list(terms)
    # [h, pi] = -(pi o ad_h): (pi o ad_h)_m = sum_l pi_l ad(h)[l, m]
    for i in range(n):
        adi = h.ad(h.basis_vector(i))
        for l in range(n):
            for m in range(n):
                if adi[l, m]:
                    # [e_i, e_l*] = sum_m adi[l, m] e_m*
                    key = (i, n + l)
                    sc.setdefault(key, [])
                    sc[key] = _add_term(sc[key], n + m, int(adi[l, m]), p)
    sc = {k: v for k, v in sc.items() if v}
    alg = LieSuperAlgebra(p, names, ["even"] * (2 * n), sc)
    images = {}
    for j in range(n):
        img = np.zeros(2 * n, dtype=np.int64)
        img[:n] = pm_h.even_images[j]
        images[j] = img
    for l in range(n):
        images[n + l] = np.zeros(2 * n, dtype=np.int64)
    gram = np.zeros((2 * n, 2 * n), dtype=np.int64)
    gram[:n, n:] = np.eye(n, dtype=np.int64)
    gram[n:, :n] = np.eye(n, dtype=np.int64)
    B = BilForm.make("even", gram, p)
    return alg, jacobson_extend(alg, images), B


def _add_term(terms, k, c, p):
    out = dict(terms)
    out[k] = (out.get(k, 0) + c) % p
    return [(a, b) for a, b in sorted(out.items()) if b]


# ---------------------------------------------------------------------------
# osp(1|2) and the queer series
# ---------------------------------------------------------------------------

def build_osp12(p: int):
    """osp(1|2) in the basis e1 = [x1,y1], e2 = x1, e3 = x2, e4 = y1,
    e5 = y2 with x2 = [x1,x1], y2 = [y1,y1]."""
    if p == 2:
        raise ValueError("osp(1|2) fixtures need p > 2")
    names = ["e1", "x1", "x2", "y1", "y2"]
    parities = ["even", "odd", "even", "odd", "even"]
    sc = {
        (0, 1): [(1, 1)],
        (0, 2): [(2, 2)],
        (0, 3): [(3, -1)],
        (0, 4): [(4, -2)],
        (1, 1): [(2, 1)],
        (1, 3): [(0, 1)],
        (1, 4): [(3, -2)],
        (2, 3): [(1, -2)],
        (2, 4): [(0, -4)],
        (3, 3): [(4, 1)],
    }
    alg = LieSuperAlgebra(p, names, parities, sc)
    gram = np.zeros((5, 5), dtype=np.int64)
    gram[0, 0] = 2
    gram[1, 3] = 2
    gram[3, 1] = -2
    gram[2, 4] = 2
    gram[4, 2] = 2
    B = BilForm.make("even", gram, p)
    e1 = np.zeros(5, dtype=np.int64)
    e1[0] = 1
    images = {0: e1, 2: np.zeros(5, dtype=np.int64), 4: np.zeros(5, dtype=np.int64)}
    return alg, B, jacobson_extend(alg, images)


def _queer_matrices(n: int):
    """q(n) inside gl(n|n): even (A, A) on the diagonal blocks, odd (B, B)
    on the antidiagonal ones."""
    mats, names, parities = [], [], []
    for i in range(n):
        for j in range(n):
            m = np.zeros((2 * n, 2 * n), dtype=np.int64)
            m[i, j] = 1
            m[n + i, n + j] = 1
            mats.append(m)
            names.append(f"A{i + 1}{j + 1}")
            parities.append("even")
    for i in range(n):
        for j in range(n):
            m = np.zeros((2 * n, 2 * n), dtype=np.int64)
            m[i, n + j] = 1
            m[n + i, j] = 1
            mats.append(m)
            names.append(f"B{i + 1}{j + 1}")
            parities.append("odd")
    return mats, names, parities


def _queer_gram(names, parities, p):
    """Odd trace form B((A,B),(A',B')) = tr(AB') + tr(BA')."""
    k = len(names)
    g = np.zeros((k, k), dtype=np.int64)
    for a in range(k):
        for b in range(k):
            if parities[a] == parities[b]:
                continue
            ia, ja = int(names[a][1]) - 1, int(names[a][2]) - 1
            ib, jb = int(names[b][1]) - 1, int(names[b][2]) - 1
            if ja == ib and jb == ia:
                g[a, b] = 1
    return BilForm.make("odd", g % p, p)


def build_q(n: int, p: int):
    if p == 2:
        raise ValueError("queer fixtures need p > 2")
    mats, names, parities = _queer_matrices(n)
    alg, mats, coords = algebra_from_matrices(p, mats, names, parities)
    B = _queer_gram(names, parities, p)
    return alg, B, jacobson_extend(alg, _matrix_pmap_images(alg, mats, coords, p))


def build_psq(n: int, p: int):
    """psq(n) = (first derived algebra of q(n)) / scalars, n > 2."""
    if n <= 2:
        raise ValueError("psq(n) fixtures need n > 2")
    qn, Bq, pmq = build_q(n, p)
    sub_names = []
    rows = []
    for a, name in enumerate(qn.names):
        v = qn.basis_vector(a)
        i, j = int(name[1]) - 1, int(name[2]) - 1
        if name[0] == "A":
            rows.append(v)
            sub_names.append(name)
        elif i != j:
            rows.append(v)
            sub_names.append(name)
    # odd Cartan part of sl(n): B_ii - B_{i+1,i+1}
    for i in range(n - 1):
        v = qn.basis_vector(qn.index(f"B{i + 1}{i + 1}")) - qn.basis_vector(
            qn.index(f"B{i + 2}{i + 2}")
        )
        rows.append(v % p)
        sub_names.append(f"k{i + 1}")
    q1 = qn.subalgebra_on_basis(np.array(rows), names=sub_names)
    images = {}
    rows = np.array(rows) % p
    from .algebra import _coordinate_solver_rect

    span = Subspace.from_rows(rows, qn.dim, p)
    coords = _coordinate_solver_rect(rows, span, p)
    from .restricted import evaluate

    for j in q1.even_indices():
        images[j] = coords(evaluate(pmq, rows[j]))
    pm1 = jacobson_extend(q1, images)
    centre_vec = np.zeros(q1.dim, dtype=np.int64)
    for i in range(n):
        centre_vec[q1.index(f"A{i + 1}{i + 1}")] = 1
    centre = Subspace.from_rows(centre_vec.reshape(1, -1), q1.dim, p)
    psq, pm = quotient_pmap(q1, pm1, centre)
    # transport the odd trace form through the representatives
    gram = np.zeros((psq.dim, psq.dim), dtype=np.int64)
    piv = set(centre.pivots())
    rep_cols = [c for c in range(q1.dim) if c not in piv]
    big_gram = (rows @ Bq.gram @ rows.T) % p
    for a, ca in enumerate(rep_cols):
        for b, cb in enumerate(rep_cols):
            gram[a, b] = big_gram[ca, cb]
    B = BilForm.make("odd", gram, p)
    names = [q1.names[c] for c in rep_cols]
    psq = LieSuperAlgebra(p, names, [int(x) for x in psq.parity], psq.sc)
    pm = jacobson_extend(psq, pm.even_images)
    return psq, B, pm


# ---------------------------------------------------------------------------
# vectorial algebras
# ---------------------------------------------------------------------------

def build_vect_restricted(n: int, p: int):
    if p ** n * n > 400:
        raise ValueError("vect(n;1) dimension guard exceeded")
    alg, images = build_vect(n, p)
    return alg, jacobson_extend(alg, images)


def vect11_gram(p: int = 3) -> BilForm:
    """The residue pairing on vect(1;1): B(u^(a) d, u^(b) d) is the top
    coefficient of u^(a) u^(b)."""
    O = DividedPowerAlgebra(1, p)
    dim = p
    g = np.zeros((dim, dim), dtype=np.int64)
    for a in range(p):
        for b in range(p):
            if a + b == p - 1:
                g[a, b] = O.product_coeff((a,), (b,))
    return BilForm.make("even", g, p)


def build_svect13():
    """svect^(1)(3;1) at p = 3: the span of the D_{i,j}(f), re-based on the
    deterministic monomial-field enumeration, with its p-map and the NIS
    normalized against the top pairing B(d_i, D_{j,k}(u^(tau))) = sign."""
    p = 3
    O = DividedPowerAlgebra(3, p)
    vect, vect_images = build_vect(3, p)
    vect_pm = jacobson_extend(vect, vect_images)
    tags, rows = svect1_basis(O)
    if rows.shape[0] != 52:
        raise AssertionError(f"svect basis has dim {rows.shape[0]}, expected 52")
    names = [f"D{i + 1}{j + 1}(u^({''.join(map(str, r))}))" for (i, j, r) in tags]
    alg = vect.subalgebra_on_basis(rows, names=names)

    from .algebra import _coordinate_solver_rect
    from .restricted import evaluate

    span = Subspace.from_rows(rows, vect.dim, p)
    coords = _coordinate_solver_rect(rows, span, p)
    images = {}
    for j in range(52):
        img = evaluate(vect_pm, rows[j])
        if not span.contains(img):
            raise AssertionError("svect is not closed under the p-map")
        images[j] = coords(img)
    pm = jacobson_extend(alg, images)

    forms = invariant_forms(alg, "even")
    if forms.dim != 1:
        raise AssertionError(f"svect invariant forms: dim {forms.dim}, expected 1")
    gram = forms.basis[0].reshape(52, 52)
    # normalize so that B(d_1, D_{2,3}(u^(tau))) = sign(1,2,3) = 1
    d1 = coords(monomial_field(O, 0, (0, 0, 0)))
    top = coords(hamiltonian_pair_field(O, 1, 2, (2, 2, 2)))
    val = int(d1 @ gram @ top) % p
    if val == 0:
        raise AssertionError("top pairing vanishes; wrong normalization target")
    gram = (gram * inv_mod(val, p)) % p
    B = BilForm.make("even", gram, p)
    return alg, B, pm, tags, rows, coords


# ---------------------------------------------------------------------------
# fixtures: named derivations, degree-p forms, expected values
# ---------------------------------------------------------------------------

@dataclass
class Fixture:
    name: str
    algebra: LieSuperAlgebra
    form: BilForm | None
    pmap: PMap | None
    derivations: dict = field(default_factory=dict)  # name -> (matrix, parity)
    cubics: dict = field(default_factory=dict)       # name -> CubicForm
    aliases: dict = field(default_factory=dict)      # source label -> basis index
    extras: dict = field(default_factory=dict)


def rank_one_derivation(alg: LieSuperAlgebra, terms) -> np.ndarray:
    """Decode a sum of rank-one cochain terms value (x) hat(arg).

    Each term is (value_vector, arg_index, coeff); the hat convention
    carries the sign (-1)^{parity(arg)}.
    """
    D = np.zeros((alg.dim, alg.dim), dtype=np.int64)
    for value, arg, coeff in terms:
        sgn = -1 if alg.parity[arg] else 1
        D[:, arg] = (D[:, arg] + sgn * coeff * np.asarray(value, dtype=np.int64)) % alg.p
    return D


def fixture_psl3() -> Fixture:
    alg, pm = build_psl3()
    B = psl3_gram()
    ix = {"x1": 1, "x2": 2, "x3": 3, "y1": 4, "y2": 5, "y3": 6, "h1": 0}
    e = alg.basis_vector
    der = {
        "D0_3": rank_one_derivation(alg, [
            (e(ix["x1"]), ix["x1"], 1), (e(ix["x3"]), ix["x3"], 1),
            (e(ix["y1"]), ix["y1"], 2), (e(ix["y3"]), ix["y3"], 2),
        ]),
        "D0_2": rank_one_derivation(alg, [
            (e(ix["x1"]), ix["x2"], 2), (e(ix["y2"]), ix["y1"], 1),
        ]),
        "Dm3_1": rank_one_derivation(alg, [
            (e(ix["y1"]), ix["x3"], 1), (e(ix["y3"]), ix["x1"], 1),
        ]),
    }
    cubics = {
        "P1": CubicForm(alg, {(3, 3, 5): 1, (0, 1, 3): 2, (1, 1, 2): 2}),
        "P2": CubicForm(alg, {(2, 2, 6): 1, (0, 2, 4): 2, (3, 4, 4): 1}),
        "P3": CubicForm(alg, {(0, 1, 4): 1, (3, 4, 5): 1, (1, 2, 6): 2, (0, 3, 6): 1}),
    }
    return Fixture(
        "psl3", alg, B, pm,
        derivations={k: (v, EVEN) for k, v in der.items()},
        cubics=cubics, aliases=ix,
        extras={"pairing": {"Dm3_1": "P1", "D0_2": "P2", "D0_3": "P3"},
                "p_property": {"Dm3_1": 0, "D0_2": 0, "D0_3": 1},
                "double_extension_of": {"D0_2": "gl(3)-tilde",
                                        "Dm3_1": "gl(3)-hat", "D0_3": "gl(3)"}},
    )


def fixture_manin_hei2() -> Fixture:
    """The Manin triple of hei(2) at p = 2.

    The squaring induced from z^[2] = z matches the displayed closed form;
    the restricted-cohomology table and the double-extension data are only
    consistent with the other admissible choice z^[2] = 0, which is what
    this fixture carries.  fixture_manin_hei2_zsquare() gives the variant.
    """
    h, pm_h = build_hei(2, z_square_z=False)
    alg, pm, B = build_manin_double(h, pm_h)
    ix = {n: i for i, n in enumerate(alg.names)}
    e = alg.basis_vector

    def rk1(pairs):
        return rank_one_derivation(alg, [(e(ix[v]), ix[a], c) for v, a, c in pairs])

    der = {
        "D1": rk1([("q*", "p", 1)]),
        "D2": rk1([("q*", "q", 1)]),
        "D3": rk1([("q*", "z*", 1)]),
        "D4": rk1([("p*", "p", 1)]),
        "D5": rk1([("p*", "z*", 1)]),
        "D6": rk1([("z", "z*", 1)]),
        "D7": rk1([("p", "p", 1), ("q*", "q*", 1), ("z", "z", 1)]),
        "D8": rk1([("q", "q", 1), ("p*", "p*", 1), ("z", "z", 1)]),
        "D9": rk1([("q*", "q*", 1), ("p*", "p*", 1), ("z*", "z*", 1)]),
    }
    cubics = {
        "P1": CubicForm(alg, {(ix["z"], ix["z*"]): 1, (ix["p"], ix["p*"]): 1}),
        "P2": CubicForm(alg, {(ix["z"], ix["z*"]): 1, (ix["q"], ix["q*"]): 1}),
    }
    return Fixture(
        "manin_hei2", alg, B, pm,
        derivations={k: (v, EVEN) for k, v in der.items()},
        cubics=cubics, aliases=ix,
    )


def fixture_manin_hei2_zsquare() -> Fixture:
    """Variant with z^[2] = z: the one whose squaring closed form is the
    displayed (r^2 + sw) z + st q* + wt p*."""
    h, pm_h = build_hei(2, z_square_z=True)
    alg, pm, B = build_manin_double(h, pm_h)
    fx = fixture_manin_hei2()
    return Fixture("manin_hei2_zsquare", alg, B, pm,
                   derivations=fx.derivations, cubics=fx.cubics, aliases=fx.aliases)


def fixture_osp12(p: int = 3) -> Fixture:
    alg, B, pm = build_osp12(p)
    ix = {"e1": 0, "x1": 1, "x2": 2, "y1": 3, "y2": 4}
    e = alg.basis_vector
    der = {
        "Dm3": rank_one_derivation(alg, [(e(3), 2, 2), (e(4), 1, 1)]),
        "D3": rank_one_derivation(alg, [(e(1), 4, 1), (e(2), 3, 1)]),
    }
    return Fixture("osp12", alg, B, pm,
                   derivations={k: (v, ODD) for k, v in der.items()},
                   aliases=ix)


def fixture_vect11() -> Fixture:
    alg, pm = build_vect_restricted(1, 3)
    return Fixture("vect11", alg, vect11_gram(3), pm)


def fixture_vect21() -> Fixture:
    alg, pm = build_vect_restricted(2, 2)
    return Fixture("vect21", alg, None, pm)


def fixture_psq3(p: int = 3) -> Fixture:
    alg, B, pm = build_psq(3, p)
    return Fixture("psq3", alg, B, pm)


# -- svect fixture: decoding the degree-0 and degree-3 cocycle displays ------

TAU = (2, 2, 2)


def _sub(r, *eps):
    out = list(r)
    for i in eps:
        out[i - 1] -= 1
    if min(out) < 0:
        raise ValueError("negative exponent in monomial spec")
    return tuple(out)


def _svect_vec(O, spec) -> np.ndarray:
    if spec[0] == "d":
        return monomial_field(O, spec[1] - 1, (0, 0, 0))
    _, i, j, r = spec
    return hamiltonian_pair_field(O, i - 1, j - 1, r)


def _locate(rows, v, p):
    """Index and scalar c with rows[k] = c * v; error when not a basis ray."""
    v = np.asarray(v, dtype=np.int64) % p
    nz = np.nonzero(v)[0]
    if nz.size == 0:
        raise ValueError("zero vector cannot be a basis ray")
    for k in range(rows.shape[0]):
        w = rows[k]
        if not w[nz[0]]:
            continue
        c = (w[nz[0]] * inv_mod(int(v[nz[0]]), p)) % p
        if ((c * v) % p == w).all():
            return k, int(c)
    raise ValueError("vector is not proportional to any enumerated basis field")


# (value terms, hatted argument) lists; D(arg) += coeff * value
_SVECT_D0_TERMS = [
    ([(1, "D", 1, 2, _sub(TAU, 1)), (2, "D", 1, 3, _sub(TAU, 1)), (2, "D", 2, 3, _sub(TAU, 1))],
     ("D", 1, 2, _sub(TAU, 1))),
    ([(2, "D", 1, 3, _sub(TAU, 2)), (1, "D", 1, 2, _sub(TAU, 2))], ("D", 1, 2, _sub(TAU, 2))),
    ([(2, "D", 1, 3, TAU)], ("D", 1, 2, TAU)),
    ([(1, "D", 2, 3, _sub(TAU, 1, 1))], ("D", 1, 2, _sub(TAU, 1, 1))),
    ([(1, "D", 1, 3, _sub(TAU, 1, 2))], ("D", 1, 2, _sub(TAU, 1, 2))),
    ([(2, "D", 2, 3, _sub(TAU, 2))], ("D", 2, 3, _sub(TAU, 2))),
    ([(2, "D", 1, 3, _sub(TAU, 2, 3))], ("D", 1, 3, _sub(TAU, 2, 3))),
    ([(2, "D", 2, 3, _sub(TAU, 2, 3))], ("D", 2, 3, _sub(TAU, 2, 3))),
    ([(1, "D", 1, 2, _sub(TAU, 2, 3))], ("D", 1, 2, _sub(TAU, 2, 3))),
    ([(1, "D", 1, 3, _sub(TAU, 2, 2)), (1, "D", 2, 3, _sub(TAU, 2, 2))],
     ("D", 1, 3, _sub(TAU, 2, 2))),
    ([(2, "d", 1)], ("d", 1)),
    ([(2, "d", 1)], ("d", 2)),
    ([(1, "D", 1, 3, _sub(TAU, 1, 1))], ("D", 1, 3, _sub(TAU, 1, 1))),
    ([(2, "D", 1, 3, _sub(TAU, 1, 3))], ("D", 1, 3, _sub(TAU, 1, 3))),
    ([(2, "D", 2, 3, _sub(TAU, 1, 3))], ("D", 2, 3, _sub(TAU, 1, 3))),
    ([(1, "D", 1, 2, _sub(TAU, 2, 3, 3))], ("D", 1, 2, _sub(TAU, 2, 3, 3))),
    ([(1, "D", 1, 3, _sub(TAU, 2, 2, 3))], ("D", 1, 3, _sub(TAU, 2, 2, 3))),
    ([(1, "D", 2, 3, _sub(TAU, 1, 1, 3))], ("D", 2, 3, _sub(TAU, 1, 1, 3))),
    ([(1, "D", 1, 3, _sub(TAU, 1, 2, 3))], ("D", 1, 3, _sub(TAU, 1, 2, 3))),
    ([(2, "D", 2, 3, _sub(TAU, 2, 3, 3))], ("D", 2, 3, _sub(TAU, 2, 3, 3))),
    ([(2, "D", 1, 3, _sub(TAU, 1, 3, 3))], ("D", 1, 3, _sub(TAU, 1, 3, 3))),
    ([(2, "D", 1, 2, _sub(TAU, 1, 2, 2))], ("D", 1, 2, _sub(TAU, 1, 2, 2))),
    ([(2, "D", 2, 3, _sub(TAU, 1, 3, 3))], ("D", 2, 3, _sub(TAU, 1, 3, 3))),
    ([(1, "D", 2, 3, _sub(TAU, 1, 1, 3, 3))], ("D", 2, 3, _sub(TAU, 1, 1, 3, 3))),
    ([(1, "D", 2, 3, _sub(TAU, 2, 2, 3))], ("D", 2, 3, _sub(TAU, 2, 2, 3))),
    ([(1, "D", 1, 3, _sub(TAU, 1, 1, 3))], ("D", 1, 3, _sub(TAU, 1, 1, 3))),
    ([(2, "D", 1, 2, _sub(TAU, 2, 1, 1))], ("D", 1, 2, _sub(TAU, 2, 1, 1))),
    ([(1, "D", 1, 3, _sub(TAU, 2, 2, 3, 3))], ("D", 1, 3, _sub(TAU, 2, 2, 3, 3))),
    ([(1, "D", 1, 3, _sub(TAU, 2, 2, 1, 1))], ("D", 1, 3, _sub(TAU, 2, 2, 1, 1))),
    ([(1, "D", 2, 3, _sub(TAU, 2, 2, 1, 1))], ("D", 2, 3, _sub(TAU, 2, 2, 1, 1))),
]

_SVECT_D3_TERMS = [
    ([(2, "D", 1, 3, TAU)], ("D", 2, 3, _sub(TAU, 2, 3, 3))),
    ([(1, "D", 1, 2, TAU)], ("D", 2, 3, _sub(TAU, 3, 2, 2))),
    ([(2, "D", 1, 3, _sub(TAU, 1)), (2, "D", 1, 2, _sub(TAU, 1))],
     ("D", 1, 3, _sub(TAU, 2, 2, 3, 3))),
    ([(1, "D", 1, 3, _sub(TAU, 1, 1))], ("d", 3)),
    ([(1, "D", 1, 2, _sub(TAU, 1, 1))], ("d", 2)),
]

# the degree-p form on svect, written over the source's named coordinates
_SVECT_CUBIC_NAMED = {
    (32, 2, 2): 2, (9, 12, 2): 1, (10, 17, 2): 1, (4, 20, 2): 2, (8, 21, 2): 2,
    (3, 37, 2): 1, (7, 8, 8): 1, (4, 4, 9): 1, (4, 8, 10): 1, (4, 8, 11): 2,
    (1, 8, 12): 2, (3, 11, 12): 1, (3, 8, 15): 1, (1, 4, 17): 1, (3, 7, 17): 2,
    (3, 4, 22): 2, (3, 3, 28): 2,
}

_SVECT_NAMED_VECTORS = {
    1: (1, "d", 1), 2: (1, "d", 2), 3: (1, "d", 3),
    4: (2, "D", 1, 2, _sub(TAU, 2, 2, 3, 3)),
    7: (1, "D", 2, 3, _sub(TAU, 1, 1, 2, 2)),
    8: (1, "D", 1, 3, _sub(TAU, 2, 2, 3, 3)),
    9: (1, "D", 2, 3, _sub(TAU, 1, 1, 3, 3)),
    10: (1, "D", 1, 2, _sub(TAU, 1, 2, 3, 3)),
    11: (1, "D", 1, 3, _sub(TAU, 2, 2, 3, 1)),
    12: (1, "D", 2, 3, _sub(TAU, 3, 2, 2)),
    15: (2, "D", 1, 2, _sub(TAU, 3, 2, 2)),
    17: (1, "D", 2, 3, _sub(TAU, 3, 3, 2)),
    20: (1, "D", 1, 3, _sub(TAU, 3, 3, 2)),
    21: (1, "D", 1, 2, _sub(TAU, 3, 3, 2)),
    22: (1, "D", 1, 3, _sub(TAU, 3, 2, 2)),
    28: (1, "D", 2, 3, _sub(TAU, 2, 2)),
    32: (1, "D", 2, 3, _sub(TAU, 3, 3)),
    37: (1, "D", 2, 3, _sub(TAU, 3, 2)),
}


def fixture_svect13() -> Fixture:
    alg, B, pm, tags, rows, coords = build_svect13()
    O = DividedPowerAlgebra(3, 3)
    p = 3

    def dual_row(spec_with_coeff):
        c0 = spec_with_coeff[0]
        v = (c0 * _svect_vec(O, spec_with_coeff[1:])) % p
        k, c = _locate(rows, v, p)
        return k, c

    def decode(terms):
        D = np.zeros((52, 52), dtype=np.int64)
        for values, arg in terms:
            vec = np.zeros(O.n * O.dim, dtype=np.int64)
            for cv, *spec in values:
                vec = (vec + cv * _svect_vec(O, tuple(spec))) % p
            vcoords = coords(vec)
            k, c = _locate(rows, _svect_vec(O, arg), p)
            D[:, k] = (D[:, k] + c * vcoords) % p
        return D
    der = {"D0": decode(_SVECT_D0_TERMS), "D3": decode(_SVECT_D3_TERMS)}

    named = {}
    for idx, spec in _SVECT_NAMED_VECTORS.items():
        named[idx] = dual_row(spec)
    cubic_terms = {}
    for mono, coeff in _SVECT_CUBIC_NAMED.items():
        c = coeff
        key = []
        for i in mono:
            k, scale = named[i]
            key.append(k)
            c = (c * scale) % p
        cubic_terms[tuple(sorted(key))] = (cubic_terms.get(tuple(sorted(key)), 0) + c) % p
    cubics = {"P": CubicForm(alg, cubic_terms)}
    return Fixture("svect13", alg, B, pm,
                   derivations={"D0": (der["D0"], EVEN), "D3": (der["D3"], EVEN)},
                   cubics=cubics,
                   extras={"tags": tags, "rows": rows, "named": named})


_FIXTURES = {
    "psl3": fixture_psl3,
    "manin_hei2": fixture_manin_hei2,
    "manin_hei2_zsquare": fixture_manin_hei2_zsquare,
    "osp12": fixture_osp12,
    "svect13": fixture_svect13,
    "vect11": fixture_vect11,
    "vect21": fixture_vect21,
    "psq3": fixture_psq3,
}


def fixture(name: str) -> Fixture:
    if name not in _FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {sorted(_FIXTURES)}")
    return _FIXTURES[name]()


__all__ = [
    "Fixture",
    "algebra_from_matrices",
    "build_gl",
    "build_hei",
    "build_manin_double",
    "build_osp12",
    "build_psl3",
    "build_psq",
    "build_q",
    "build_sl",
    "build_svect13",
    "build_vect_restricted",
    "fixture",
    "psl3_gram",
    "rank_one_derivation",
    "vect11_gram",
]
