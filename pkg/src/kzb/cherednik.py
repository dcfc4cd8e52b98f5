"""Rational Cherednik algebra arithmetic with symbolic parameters.

The algebra is generated by the Weyl group W, a symmetric algebra on the
dual space (x-side) and one on the reflection representation (y-side),
over the coefficient ring Q[hbar, c_1..c_r] with one c per root length
class.  The working bases are dual to each other without leaving the
rationals: y-letters are the fundamental coweights lam_i and x-letters
are the simple roots alpha_j, paired by alpha_j(lam_i) = delta_ij.
Identifying the two spaces through the invariant form, pi(lam_i) has
x-coordinates given by the coweight Gram matrix, and a coroot alpha_vee
has x-coordinates (2/(alpha|alpha)) * simple_coords(alpha).

Elements are kept in PBW normal order: every term is

    x-monomial * w * y-monomial        (coefficient in Q[hbar, c])

and products are straightened with the commutation rule

    [y, x] = hbar <y, x> - sum_s c_s <alpha_s, y> <alpha_s_vee, x> s ,

the sum running over all reflections, together with w x w^-1 = w(x) and
w y w^-1 = w(y).  All bookkeeping is exact; sample evaluation mixes
complex scalars into the same polynomial dictionaries.

The map from the connection coefficient algebra sends

    x_i -> a pi(lam_i),   y_i -> b lam_i,
    t_alpha -> ab ( hbar / h_vee  -  (2 c_alpha / (alpha|alpha)) s_alpha )

and extends to the derivation generators by d -> h/hbar, X -> (a/b) E/hbar,
Delta0 -> (b/a) F/hbar and delta_{2m} -> -2 a^{2m-1} b^{-1} / hbar *
sum_alpha (c_alpha^2/(alpha,alpha)) x_{alpha_vee}^{2m}.  Every identity
involving 1/hbar is checked after clearing denominators; hbar is never
inverted.
"""

from fractions import Fraction

from .rootsys import (
    dual_coxeter,
    identity_matrix,
    mat_apply,
    mat_mul,
    solve_exact,
)
from .elliptic import k_jet
from .liealg import build_quotient
from .freelie import expand
from . import connection as _conn

TWO_PI_I = _conn.TWO_PI_I


# ---------------------------------------------------------------------------
# polynomial coefficients: dict {exponent tuple: number}

def _padd(p, q):
    out = dict(p)
    for e, v in q.items():
        nv = out.get(e, 0) + v
        if nv:
            out[e] = nv
        else:
            out.pop(e, None)
    return out


def _pscale(p, c):
    if not c:
        return {}
    return {e: v * c for e, v in p.items()}


def _pmul(p, q):
    out = {}
    for e1, v1 in p.items():
        for e2, v2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            nv = out.get(e, 0) + v1 * v2
            if nv:
                out[e] = nv
            else:
                out.pop(e, None)
    return out


def _pmax_abs(p):
    return max((abs(v) for v in p.values()), default=0.0)


class CherednikElement:
    """A PBW normal-form element; terms maps (xmono, perm, ymono) to a
    coefficient polynomial."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg, terms=None):
        self.alg = alg
        self.terms = terms if terms is not None else {}

    def __add__(self, other):
        out = dict(self.terms)
        for k, p in other.terms.items():
            np = _padd(out.get(k, {}), p)
            if np:
                out[k] = np
            else:
                out.pop(k, None)
        return CherednikElement(self.alg, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __mul__(self, other):
        return self.alg.mul(self, other)

    def scale(self, c):
        if not c:
            return CherednikElement(self.alg)
        return CherednikElement(
            self.alg, {k: _pscale(p, c) for k, p in self.terms.items()}
        )

    def pscale(self, poly):
        out = {}
        for k, p in self.terms.items():
            np = _pmul(p, poly)
            if np:
                out[k] = np
        return CherednikElement(self.alg, out)

    def is_zero(self):
        return not self.terms

    def max_abs(self):
        return max((_pmax_abs(p) for p in self.terms.values()), default=0.0)

    def commutator(self, other):
        return self * other - other * self

    def bidegrees(self):
        """Set of (x-weight, y-weight) over all terms; hbar and every c
        count (1,1), matching the connection coefficient grading."""
        out = set()
        for (xm, _, ym), p in self.terms.items():
            for e in p:
                s = sum(e)
                out.add((sum(xm) + s, sum(ym) + s))
        return out

    def subs(self, hbar, cvals):
        """Evaluate the coefficient polynomials at numbers; cvals maps
        orbit index (or orbit key) to a value."""
        alg = self.alg
        vals = [hbar] + [
            cvals[i] if i in cvals else cvals[alg.orbit_keys[i]]
            for i in range(alg.num_orbits)
        ]
        out = {}
        for k, p in self.terms.items():
            tot = 0
            for e, v in p.items():
                term = v
                for base, ex in zip(vals, e):
                    term = term * base**ex
                tot += term
            if tot:
                out[k] = tot
        return out

    def __repr__(self):
        return "CherednikElement(%d terms)" % len(self.terms)


class CherednikAlgebra:
    def __init__(self, rs):
        self.rs = rs
        self.n = rs.rank
        self.npos = rs.num_positive()
        self.orbit_keys = rs.orbit_keys()
        self.num_orbits = len(self.orbit_keys)
        self.nv = 1 + self.num_orbits
        self.h_vee = dual_coxeter(rs)
        self._zexp = (0,) * self.nv
        self.iperm = tuple(range(len(rs.roots)))
        self._mats = {self.iperm: identity_matrix(rs.ambient_dim)}
        self.refl = []
        for k in range(self.npos):
            m = rs.reflection_matrix(k)
            self.refl.append(self._register(m))
        self.orbit_of = [
            self.orbit_keys.index(rs.orbit_key(k)) for k in range(self.npos)
        ]
        # alpha_k(lam_i) and <alpha_j, alpha_k_vee>
        self._A = [
            tuple(int(c) for c in rs.simple_coords(k)) for k in range(self.npos)
        ]
        self._B = [
            tuple(rs.int_pair(rs.simple[j], k) for j in range(self.n))
            for k in range(self.npos)
        ]
        lam = rs.coweights
        self.coweights = lam
        self.gram = [
            tuple(rs.form(lam[i], lam[j]) for j in range(self.n))
            for i in range(self.n)
        ]
        self.gram_inv = self._invert(self.gram)
        # coroot of positive root k in x-letter (simple root) coordinates
        self.coroot_x = []
        for k in range(self.npos):
            s = Fraction(2) / rs.sq(rs.roots[k])
            self.coroot_x.append(tuple(s * c for c in rs.simple_coords(k)))
        self._ysx = {}
        self._ybx = {}
        self._wx = {}
        self._wy = {}
        self._xi_words = {}

    # -- group bookkeeping ------------------------------------------------

    def _register(self, matrix):
        perm = tuple(self.rs.index(mat_apply(matrix, r)) for r in self.rs.roots)
        if perm not in self._mats:
            self._mats[perm] = matrix
        return perm

    def perm_mul(self, p1, p2):
        p = tuple(p1[p2[s]] for s in range(len(p2)))
        if p not in self._mats:
            self._mats[p] = mat_mul(self._mats[p1], self._mats[p2])
        return p

    def perm_inv(self, p):
        q = [0] * len(p)
        for s, d in enumerate(p):
            q[d] = s
        q = tuple(q)
        if q not in self._mats:
            m = self._mats[p]
            self._mats[q] = tuple(
                tuple(m[j][i] for j in range(len(m))) for i in range(len(m))
            )
        return q

    @staticmethod
    def _invert(g):
        n = len(g)
        rows = [tuple(g[i][j] for j in range(n)) for i in range(n)]
        cols = []
        for j in range(n):
            rhs = [Fraction(1) if i == j else Fraction(0) for i in range(n)]
            sol = solve_exact(rows, rhs)
            if sol is None:
                raise ValueError("degenerate Gram matrix")
            cols.append(sol)
        return [tuple(cols[j][i] for j in range(n)) for i in range(n)]

    # -- monomial transport under the group -------------------------------

    def _w_on_xmono(self, perm, xm):
        key = (perm, xm)
        got = self._wx.get(key)
        if got is not None:
            return got
        out = {(0,) * self.n: Fraction(1)}
        mat = self._mats[perm]
        for j, e in enumerate(xm):
            if not e:
                continue
            img = mat_apply(mat, self.rs.simple[j])
            coords = self.rs.simple_coords(self.rs.index(img))
            lin = {
                tuple(1 if l == pos else 0 for l in range(self.n)): c
                for pos, c in enumerate(coords)
                if c
            }
            for _ in range(e):
                out = self._mono_mul(out, lin)
        self._wx[key] = out
        return out

    def _w_on_ymono(self, perm, ym):
        key = (perm, ym)
        got = self._wy.get(key)
        if got is not None:
            return got
        out = {(0,) * self.n: Fraction(1)}
        mat = self._mats[perm]
        for i, e in enumerate(ym):
            if not e:
                continue
            img = mat_apply(mat, self.coweights[i])
            coords = self.rs.coweight_coords(img)
            lin = {
                tuple(1 if l == pos else 0 for l in range(self.n)): c
                for pos, c in enumerate(coords)
                if c
            }
            for _ in range(e):
                out = self._mono_mul(out, lin)
        self._wy[key] = out
        return out

    @staticmethod
    def _mono_mul(d1, d2):
        out = {}
        for m1, c1 in d1.items():
            for m2, c2 in d2.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                nv = out.get(m, 0) + c1 * c2
                if nv:
                    out[m] = nv
                else:
                    out.pop(m, None)
        return out

    def linear_x_power(self, coords, m):
        """Expansion of (sum coords_l x_l)^m as x-monomial dict."""
        lin = {
            tuple(1 if l == pos else 0 for l in range(self.n)): Fraction(c)
            for pos, c in enumerate(coords)
            if c
        }
        out = {(0,) * self.n: Fraction(1)}
        for _ in range(m):
            out = self._mono_mul(out, lin)
        return out

    # -- straightening ----------------------------------------------------

    def _hbar_mono(self):
        return tuple(1 if i == 0 else 0 for i in range(self.nv))

    def _c_mono(self, orbit, power=1):
        return tuple(
            power if i == 1 + orbit else 0 for i in range(self.nv)
        )

    def one_poly(self):
        return {self._zexp: Fraction(1)}

    def _y_single_x(self, i, c):
        """Normal form of y_i * x^c as {(xm, perm, ym): poly}."""
        key = (i, c)
        got = self._ysx.get(key)
        if got is not None:
            return got
        zeros = (0,) * self.n
        if not any(c):
            ei = tuple(1 if l == i else 0 for l in range(self.n))
            res = {(zeros, self.iperm, ei): self.one_poly()}
            self._ysx[key] = res
            return res
        j = next(l for l in range(self.n) if c[l])
        c1 = tuple(e - 1 if l == j else e for l, e in enumerate(c))
        res = {}

        def put(k, poly):
            np = _padd(res.get(k, {}), poly)
            if np:
                res[k] = np
            else:
                res.pop(k, None)

        for (xm, perm, ym), poly in self._y_single_x(i, c1).items():
            xm2 = tuple(e + 1 if l == j else e for l, e in enumerate(xm))
            put((xm2, perm, ym), poly)
        if i == j:
            put((c1, self.iperm, zeros), {self._hbar_mono(): Fraction(1)})
        for k in range(self.npos):
            coef = self._A[k][i] * self._B[k][j]
            if not coef:
                continue
            poly = {self._c_mono(self.orbit_of[k]): Fraction(-coef)}
            for xm, q in self._w_on_xmono(self.refl[k], c1).items():
                put((xm, self.refl[k], zeros), _pscale(poly, q))
        self._ysx[key] = res
        return res

    def _y_block_x(self, b, c):
        """Normal form of y^b * x^c."""
        key = (b, c)
        got = self._ybx.get(key)
        if got is not None:
            return got
        if not any(b) or not any(c):
            res = {(c, self.iperm, b): self.one_poly()}
            self._ybx[key] = res
            return res
        i = next(l for l in range(self.n) if b[l])
        b1 = tuple(e - 1 if l == i else e for l, e in enumerate(b))
        res = {}
        for (xm, g, ym), p in self._y_single_x(i, c).items():
            for (xm2, g2, ym2), q in self._y_block_x(b1, xm).items():
                g3 = self.perm_mul(g2, g)
                for ym3, r in self._w_on_ymono(self.perm_inv(g), ym2).items():
                    ym4 = tuple(a + b_ for a, b_ in zip(ym3, ym))
                    kk = (xm2, g3, ym4)
                    np = _padd(res.get(kk, {}), _pscale(_pmul(p, q), r))
                    if np:
                        res[kk] = np
                    else:
                        res.pop(kk, None)
        self._ybx[key] = res
        return res

    def term_mul(self, k1, k2):
        (a1, w1, b1), (c2, w2, d2) = k1, k2
        out = {}
        w2inv = self.perm_inv(w2)
        for (xm, g, ym), q in self._y_block_x(b1, c2).items():
            for xm2, r in self._w_on_xmono(w1, xm).items():
                xkey = tuple(x + y for x, y in zip(a1, xm2))
                g3 = self.perm_mul(self.perm_mul(w1, g), w2)
                for ym2, s in self._w_on_ymono(w2inv, ym).items():
                    ykey = tuple(x + y for x, y in zip(ym2, d2))
                    kk = (xkey, g3, ykey)
                    np = _padd(out.get(kk, {}), _pscale(q, r * s))
                    if np:
                        out[kk] = np
                    else:
                        out.pop(kk, None)
        return out

    def mul(self, e1, e2):
        out = {}
        for k1, p1 in e1.terms.items():
            for k2, p2 in e2.terms.items():
                p = _pmul(p1, p2)
                for kk, q in self.term_mul(k1, k2).items():
                    np = _padd(out.get(kk, {}), _pmul(p, q))
                    if np:
                        out[kk] = np
                    else:
                        out.pop(kk, None)
        return CherednikElement(self, out)

    # -- constructors -----------------------------------------------------

    def zero(self):
        return CherednikElement(self)

    def one(self):
        zeros = (0,) * self.n
        return CherednikElement(self, {(zeros, self.iperm, zeros): self.one_poly()})

    def x_letter(self, j):
        zeros = (0,) * self.n
        xm = tuple(1 if l == j else 0 for l in range(self.n))
        return CherednikElement(self, {(xm, self.iperm, zeros): self.one_poly()})

    def y_letter(self, i):
        zeros = (0,) * self.n
        ym = tuple(1 if l == i else 0 for l in range(self.n))
        return CherednikElement(self, {(zeros, self.iperm, ym): self.one_poly()})

    def x_element(self, coords):
        """Linear x-side element with the given simple-root coordinates."""
        zeros = (0,) * self.n
        terms = {}
        for l, c in enumerate(coords):
            if c:
                xm = tuple(1 if p == l else 0 for p in range(self.n))
                terms[(xm, self.iperm, zeros)] = {self._zexp: Fraction(c)}
        return CherednikElement(self, terms)

    def y_element(self, coords):
        zeros = (0,) * self.n
        terms = {}
        for l, c in enumerate(coords):
            if c:
                ym = tuple(1 if p == l else 0 for p in range(self.n))
                terms[(zeros, self.iperm, ym)] = {self._zexp: Fraction(c)}
        return CherednikElement(self, terms)

    def group_element(self, perm):
        zeros = (0,) * self.n
        return CherednikElement(self, {(zeros, perm, zeros): self.one_poly()})

    def x_coroot_power(self, k, m):
        """x_{alpha_vee}^m for positive root k, exact."""
        zeros = (0,) * self.n
        terms = {}
        for xm, c in self.linear_x_power(self.coroot_x[k], m).items():
            terms[(xm, self.iperm, zeros)] = {self._zexp: c}
        return CherednikElement(self, terms)

    # -- distinguished elements ------------------------------------------

    def euler_element(self):
        """h = sum_i x_i y_i + (n/2) hbar - sum_s c_s s."""
        out = self.zero()
        zeros = (0,) * self.n
        for i in range(self.n):
            xm = tuple(1 if l == i else 0 for l in range(self.n))
            out = out + CherednikElement(
                self, {(xm, self.iperm, xm[:]): self.one_poly()}
            )
        out = out + CherednikElement(
            self,
            {
                (zeros, self.iperm, zeros): {
                    self._hbar_mono(): Fraction(self.n, 2)
                }
            },
        )
        for k in range(self.npos):
            out = out + self.group_element(self.refl[k]).pscale(
                {self._c_mono(self.orbit_of[k]): Fraction(-1)}
            )
        return out

    def euler_symmetrized(self):
        """sum_i (x_i y_i + y_i x_i)/2, assembled by multiplication."""
        out = self.zero()
        half = Fraction(1, 2)
        for i in range(self.n):
            xi = self.x_letter(i)
            yi = self.y_letter(i)
            out = out + (xi * yi + yi * xi).scale(half)
        return out

    def e_element(self):
        """E = -1/2 sum (lam_a|lam_b) x_a x_b (the quadratic x-side sl2
        partner; equals -1/2 sum x_i^2 in an orthonormal basis)."""
        out = self.zero()
        for a in range(self.n):
            for b in range(self.n):
                c = self.gram[a][b]
                if c:
                    out = out + (self.x_letter(a) * self.x_letter(b)).scale(
                        -Fraction(1, 2) * c
                    )
        return out

    def f_element(self):
        """F = +1/2 sum (gram^-1)_{ab} y_a y_b."""
        out = self.zero()
        for a in range(self.n):
            for b in range(self.n):
                c = self.gram_inv[a][b]
                if c:
                    out = out + (self.y_letter(a) * self.y_letter(b)).scale(
                        Fraction(1, 2) * c
                    )
        return out

    # -- the specialization map ------------------------------------------

    def xi_x(self, j, a=1):
        """Image of the degree-(1,0) generator attached to lam_j."""
        return self.x_element([a * self.gram[j][l] for l in range(self.n)])

    def xi_y(self, i, b=1):
        coords = [0] * self.n
        coords[i] = b
        return self.y_element(coords)

    def xi_t(self, k, a=1, b=1):
        zeros = (0,) * self.n
        ab = Fraction(a) * Fraction(b)
        terms = {
            (zeros, self.iperm, zeros): {self._hbar_mono(): ab / self.h_vee},
            (zeros, self.refl[k], zeros): {
                self._c_mono(self.orbit_of[k]): -2 * ab / self.rs.sq(self.rs.roots[k])
            },
        }
        return CherednikElement(self, terms)

    def xi_letter(self, letter, a=1, b=1):
        if letter < self.n:
            return self.xi_x(letter, a)
        if letter < 2 * self.n:
            return self.xi_y(letter - self.n, b)
        return self.xi_t(letter - 2 * self.n, a, b)

    def xi_word(self, word, a=1, b=1):
        key = (word, a, b)
        got = self._xi_words.get(key)
        if got is None:
            got = self.xi_letter(word[0], a, b)
            for letter in word[1:]:
                got = got * self.xi_letter(letter, a, b)
            self._xi_words[key] = got
        return got

    def xi_tensor(self, tensor, a=1, b=1):
        out = self.zero()
        for word, coeff in tensor.items():
            out = out + self.xi_word(word, a, b).scale(coeff)
        return out

    def xi_x_vector(self, u, a=1):
        """Image of x(u) for u in coweight coordinates."""
        coords = [
            a * sum(self.gram[j][l] * u[j] for j in range(self.n))
            for l in range(self.n)
        ]
        return self.x_element(coords)

    def ad_chain(self, k, m, a=1, b=1):
        """(ad x(alpha_vee)/2)^m applied to the t_alpha image."""
        half_x = self.x_element(
            [Fraction(c) * a / 2 for c in self.coroot_x[k]]
        )
        out = self.xi_t(k, a, b)
        for _ in range(m):
            out = half_x.commutator(out)
        return out


def specialize_element(elem, hbar, cvals):
    """Numeric-coefficient copy of an element (parameters substituted)."""
    alg = elem.alg
    out = {}
    for key, val in elem.subs(hbar, cvals).items():
        out[key] = {alg._zexp: val}
    return CherednikElement(alg, out)


def term_list(elem):
    """Deterministic JSON-ready form: one entry per PBW term, each with
    the x-monomial, the group element as a root permutation, the
    y-monomial and the coefficient polynomial as sorted exponent rows."""
    rows = []
    for (xm, perm, ym) in sorted(elem.terms):
        poly = elem.terms[(xm, perm, ym)]
        prows = []
        for e in sorted(poly):
            v = poly[e]
            if isinstance(v, Fraction):
                prows.append([list(e), [int(v.numerator), int(v.denominator)]])
            elif isinstance(v, complex):
                prows.append([list(e), [v.real, v.imag]])
            else:
                prows.append([list(e), [float(v), 0.0]])
        rows.append(
            {"x": list(xm), "w": list(perm), "y": list(ym), "coeff": prows}
        )
    return rows


_ALG_CACHE = {}


def get_algebra(rs):
    key = (rs.label, rs.rank)
    if key not in _ALG_CACHE:
        _ALG_CACHE[key] = CherednikAlgebra(rs)
    return _ALG_CACHE[key]


# ---------------------------------------------------------------------------
# exact verification reports

def _record(report, name, elem):
    report["checked"].append(name)
    if not elem.is_zero():
        report["failures"].append(name)


def verify_sl2(rs):
    """The deformed Euler element and its quadratic partners satisfy the
    sl2 relations after clearing hbar; both displayed forms of h agree.

    The constant term of h must be (dim h / 2) * hbar for the two forms
    to coincide; a bare dimension constant would not even be homogeneous.
    """
    alg = get_algebra(rs)
    report = {"label": rs.label + str(rs.rank), "checked": [], "failures": []}
    h = alg.euler_element()
    e = alg.e_element()
    f = alg.f_element()
    hbar = {alg._hbar_mono(): Fraction(1)}
    _record(report, "euler_forms_agree", h - alg.euler_symmetrized())
    for j in range(alg.n):
        xj = alg.x_letter(j)
        yj = alg.y_letter(j)
        _record(report, "h_x%d" % j, h.commutator(xj) - xj.pscale(hbar))
        _record(report, "h_y%d" % j, h.commutator(yj) + yj.pscale(hbar))
    _record(report, "h_e", h.commutator(e) - e.pscale(hbar).scale(2))
    _record(report, "h_f", h.commutator(f) + f.pscale(hbar).scale(2))
    _record(report, "e_f", e.commutator(f) - h.pscale(hbar))
    report["ok"] = not report["failures"]
    return report


def verify_xi(rs, a=1, b=1, relation_exprs=None):
    """Push every defining relation of the connection coefficient algebra
    through the specialization map and demand an exactly zero element.

    Also certifies that the t-images are linearly independent: their
    group parts are distinct reflections with nonzero coefficients.
    """
    alg = get_algebra(rs)
    if relation_exprs is None:
        relation_exprs = build_quotient(rs, N=4).relation_exprs
    report = {
        "label": rs.label + str(rs.rank),
        "checked": [],
        "failures": [],
        "relations": len(relation_exprs),
    }
    counts = {}
    for kind, tensor in relation_exprs:
        idx = counts.get(kind, 0)
        counts[kind] = idx + 1
        _record(report, "%s_%d" % (kind, idx), alg.xi_tensor(tensor, a, b))
    report["by_kind"] = counts
    # independence of the t-images
    perms = {alg.refl[k] for k in range(alg.npos)}
    report["t_image_rank"] = alg.npos if len(perms) == alg.npos else len(perms)
    if report["t_image_rank"] != alg.npos:
        report["failures"].append("t_independence")
    # bigrading of the generator images
    for j in range(alg.n):
        if alg.xi_x(j, a).bidegrees() - {(1, 0)}:
            report["failures"].append("grading_x%d" % j)
        if alg.xi_y(j, b).bidegrees() - {(0, 1)}:
            report["failures"].append("grading_y%d" % j)
    for k in range(alg.npos):
        if alg.xi_t(k, a, b).bidegrees() - {(1, 1)}:
            report["failures"].append("grading_t%d" % k)
    report["ok"] = not report["failures"]
    return report


def verify_xi_spots(rs, a=1, b=1, k_spots=None, max_subsystems=4):
    """Relation checks evaluated directly as commutators, with no
    coefficient-algebra build; this is how large ranks (F4) are covered.

    Runs every yx relation, the tx/ty kernel relations at selected
    positive roots, and the rank-2 subsystem tt sums.
    """
    alg = get_algebra(rs)
    report = {"label": rs.label + str(rs.rank), "checked": [], "failures": []}
    if k_spots is None:
        k_spots = sorted({0, alg.n - 1, alg.npos // 2, alg.npos - 1})
    for i in range(alg.n):
        for j in range(alg.n):
            lhs = alg.xi_y(i, b).commutator(alg.xi_x(j, a))
            for k in range(alg.npos):
                c = alg._A[k][j] * alg._A[k][i]
                if c:
                    lhs = lhs - alg.xi_t(k, a, b).scale(c)
            _record(report, "yx_%d_%d" % (i, j), lhs)
    for k in k_spots:
        row = alg._A[k]
        j0 = next(j for j in range(alg.n) if row[j])
        for j in range(alg.n):
            if j == j0:
                continue
            u = [0] * alg.n
            u[j] = row[j0]
            u[j0] = -row[j]
            xu = alg.zero()
            yu = alg.zero()
            for l, c in enumerate(u):
                if c:
                    xu = xu + alg.xi_x(l, a).scale(c)
                    yu = yu + alg.xi_y(l, b).scale(c)
            tk = alg.xi_t(k, a, b)
            _record(report, "tx_%d_%d" % (k, j), tk.commutator(xu))
            _record(report, "ty_%d_%d" % (k, j), tk.commutator(yu))
    from .rootsys import rank2_subsystems

    for pos, psi in enumerate(rank2_subsystems(rs)[:max_subsystems]):
        for g in psi.positive:
            acc = alg.zero()
            for h in psi.positive:
                if h != g:
                    acc = acc + alg.xi_t(g, a, b).commutator(alg.xi_t(h, a, b))
            _record(report, "tt_%d_%d" % (pos, g), acc)
    report["ok"] = not report["failures"]
    return report


def _delta_image(alg, two_m, a, b):
    """hbar * image of delta_{2m}: the element
    -2 a^{2m+1} b sum_alpha (c_alpha^2/(alpha,alpha)) x_{alpha_vee}^{2m}.

    The twist power is forced by covariance: the free-side formula for
    delta acting on y has x-weight 2m+1 and y-weight 1.  Expressed in the
    effective parameters of the specialized algebra (hbar and c both pick
    up a factor ab) the prefactor reads a^{2m-1} b^{-1}."""
    out = alg.zero()
    scale = -2 * Fraction(a) ** (two_m + 1) * Fraction(b)
    for k in range(alg.npos):
        poly = {alg._c_mono(alg.orbit_of[k], 2): scale / alg.rs.sq(alg.rs.roots[k])}
        out = out + alg.x_coroot_power(k, two_m).pscale(poly)
    return out


def verify_xi_tilde(rs, a=1, b=1, max_m=2):
    """Extension of the specialization map to the derivation action,
    verified after clearing all powers of hbar.

    For each derivation generator D with cleared image T = hbar*image(D),
    and each algebra generator g, the module relation reads
    [T, xi(g)] = hbar * xi(D(g)) with D(g) the explicit free formula.
    """
    alg = get_algebra(rs)
    af, bf = Fraction(a), Fraction(b)
    report = {"label": rs.label + str(rs.rank), "checked": [], "failures": []}
    hbar = {alg._hbar_mono(): Fraction(1)}
    h = alg.euler_element()
    te = alg.e_element().scale(af / bf)
    tf = alg.f_element().scale(bf / af)

    def ximg(letter):
        return alg.xi_letter(letter, a, b)

    # the sl2 part of the derivation algebra, cleared
    _record(report, "d_X", h.commutator(te) - te.pscale(hbar).scale(2))
    _record(report, "d_Delta0", h.commutator(tf) + tf.pscale(hbar).scale(2))
    _record(report, "X_Delta0", te.commutator(tf) - h.pscale(hbar))

    # action of d, X, Delta0 on the generators
    for j in range(alg.n):
        xj, yj = ximg(j), ximg(alg.n + j)
        _record(report, "d_on_x%d" % j, h.commutator(xj) - xj.pscale(hbar))
        _record(report, "d_on_y%d" % j, h.commutator(yj) + yj.pscale(hbar))
        _record(report, "X_on_x%d" % j, te.commutator(xj))
        _record(
            report, "X_on_y%d" % j, te.commutator(yj) - xj.pscale(hbar)
        )
        _record(
            report, "Delta0_on_x%d" % j, tf.commutator(xj) - yj.pscale(hbar)
        )
        _record(report, "Delta0_on_y%d" % j, tf.commutator(yj))
        # the dual-basis form of [F, x_j] = hbar y_j: plain letters
        fxj = alg.f_element().commutator(alg.x_letter(j))
        yj_dual = alg.y_element([alg.gram_inv[j][l] for l in range(alg.n)])
        _record(report, "F_x_letter%d" % j, fxj - yj_dual.pscale(hbar))
    for k in range(alg.npos):
        tk = ximg(2 * alg.n + k)
        _record(report, "d_on_t%d" % k, h.commutator(tk))
        _record(report, "X_on_t%d" % k, te.commutator(tk))
        _record(report, "Delta0_on_t%d" % k, tf.commutator(tk))

    for m in range(1, max_m + 1):
        two_m = 2 * m
        tdel = _delta_image(alg, two_m, a, b)
        name = "delta%d" % two_m
        _record(
            report,
            "d_%s" % name,
            h.commutator(tdel) - tdel.pscale(hbar).scale(two_m),
        )
        _record(report, "X_%s" % name, te.commutator(tdel))
        # (ad Delta0)^{2m+1}(delta_{2m}) = 0, cleared: each ad brings one hbar
        nil = tdel
        for _ in range(two_m + 1):
            nil = tf.commutator(nil)
        _record(report, "nil_%s" % name, nil)
        for j in range(alg.n):
            _record(
                report,
                "%s_on_x%d" % (name, j),
                tdel.commutator(ximg(j)),
            )
            # action on y: (1/2) sum_alpha alpha(lam_j) sum_{p+q=2m-1} (-1)^q [C_p, C_q]
            rhs = alg.zero()
            for k in range(alg.npos):
                au = alg._A[k][j]
                if not au:
                    continue
                chains = [alg.ad_chain(k, p, a, b) for p in range(two_m)]
                for p in range(two_m):
                    q = two_m - 1 - p
                    sgn = Fraction(au, 2) * (-1) ** q
                    rhs = rhs + chains[p].commutator(chains[q]).scale(sgn)
            _record(
                report,
                "%s_on_y%d" % (name, j),
                tdel.commutator(ximg(alg.n + j)) - rhs.pscale(hbar),
            )
        for k in range(alg.npos):
            rhs = ximg(2 * alg.n + k).commutator(alg.ad_chain(k, two_m, a, b))
            _record(
                report,
                "%s_on_t%d" % (name, k),
                tdel.commutator(ximg(2 * alg.n + k)) - rhs.pscale(hbar),
            )
    report["ok"] = not report["failures"]
    return report


# ---------------------------------------------------------------------------
# the specialized connection sample

class RCASample:
    """Connection components valued in the Cherednik algebra, truncated
    to ad-order N-2 to match the coefficient-algebra truncation."""

    __slots__ = ("z", "tau", "N", "components")

    def __init__(self, z, tau, N, components):
        self.z = z
        self.tau = tau
        self.N = N
        self.components = components


def elliptic_kz_sample(rs, z, mp, N=None, a=1, b=1, params=None,
                       floor=1e-3, check_regular=True):
    """Sample the specialized connection at a torus point.

    Component i is  b y_i - sum_alpha alpha(lam_i) sum_m k_m(alpha(z))
    (ad x(alpha_vee)/2)^m (t-image), so its scalar part is
    -(hbar/h_vee) theta'/theta(alpha(z)) and its reflection part carries
    2 c_alpha/(alpha|alpha).  hbar and c stay symbolic unless params =
    (hbar, cdict) is supplied.
    """
    alg = get_algebra(rs)
    if N is None:
        N = build_quotient(rs).N
    if check_regular:
        dist = _conn.divisor_distance(rs, z, mp)
        if dist < floor:
            raise ValueError(
                "divisor proximity: distance %.3g below floor %.3g" % (dist, floor)
            )
    order = N - 2
    chains = [
        [alg.ad_chain(k, m, a, b) for m in range(order + 1)]
        for k in range(alg.npos)
    ]
    comps = []
    for i in range(alg.n):
        acc = alg.xi_y(i, b)
        for k in range(alg.npos):
            mi = alg._A[k][i]
            if not mi:
                continue
            s = sum(c * zz for c, zz in zip(alg._A[k], z))
            kj = k_jet(s, mp, order)
            for m in range(order + 1):
                acc = acc + chains[k][m].scale(-mi * kj[m])
        if params is not None:
            acc = specialize_element(acc, params[0], params[1])
        comps.append(acc)
    return RCASample(tuple(z), mp.tau, N, comps)


def kz_sample_via_lie(qa, rs, z, mp, a=1, b=1, floor=1e-3):
    """The same components obtained by sampling the coefficient-algebra
    connection and pushing through the specialization map basis word by
    basis word."""
    alg = get_algebra(rs)
    sample = _conn.kzb_sample(qa, rs, z, mp, floor=floor)
    comps = []
    for i in range(qa.n):
        acc = alg.zero()
        ce = sample.A[i]
        for bid, vec in ce.coords.items():
            words = qa.basis[bid]
            keep = qa.qbasis[bid]
            for pos, coeff in enumerate(vec):
                if coeff == 0:
                    continue
                img = alg.xi_tensor(expand(words[keep[pos]]), a, b)
                acc = acc + img.scale(complex(coeff))
        comps.append(acc)
    return RCASample(tuple(z), mp.tau, qa.N, comps)


def sample_difference(s1, s2):
    return max(
        (c1 - c2).max_abs() for c1, c2 in zip(s1.components, s2.components)
    )


def trig_kz_limit(rs, z, N=None, a=1, b=1):
    """Infinite-Im-tau limit of the specialized connection in closed form:
    the theta-kernel collapses to 2 pi i/(e^{2 pi i alpha(z)} - 1) + pi i
    plus the even Bernoulli tail in the collapsed ad-variable."""
    import math

    alg = get_algebra(rs)
    if N is None:
        N = build_quotient(rs).N
    order = N - 2
    comps = []
    for i in range(alg.n):
        acc = alg.xi_y(i, b)
        for k in range(alg.npos):
            mi = alg._A[k][i]
            if not mi:
                continue
            s = sum(c * zz for c, zz in zip(alg._A[k], z))
            w = TWO_PI_I / (_cexpm1(s)) + 1j * math.pi
            acc = acc + alg.ad_chain(k, 0, a, b).scale(-mi * w)
            for kk in range(1, (order + 1) // 2 + 1):
                mdeg = 2 * kk - 1
                if mdeg > order:
                    break
                acc = acc + alg.ad_chain(k, mdeg, a, b).scale(
                    -mi * _conn._bseries_coeff(2 * kk)
                )
        comps.append(acc)
    return RCASample(tuple(z), None, N, comps)


def _cexpm1(s):
    import cmath

    return cmath.exp(TWO_PI_I * s) - 1.0


def degeneration_check(rs, z=None, im_tau=30.0, re_tau=0.1, N=None, seed=23):
    """Componentwise agreement of the specialized sample with the closed
    trigonometric limit at large Im tau."""
    import random

    from .elliptic import ModularPoint

    if z is None:
        rng = random.Random(seed)
        z = tuple(
            rng.uniform(0.08, 0.92) + 1j * rng.uniform(0.05, 0.45)
            for _ in range(rs.rank)
        )
    mp = ModularPoint(re_tau + 1j * im_tau)
    s1 = elliptic_kz_sample(rs, z, mp, N=N)
    s2 = trig_kz_limit(rs, z, N=N)
    return sample_difference(s1, s2)


def hbar_scalar_profile(sample, rs):
    """Split each component into the scalar hbar part and the rest; the
    hbar dependence of a sample must sit entirely in the scalar term
    -(hbar/h_vee) sum_alpha alpha(lam_i) theta'/theta(alpha(z))."""
    alg = get_algebra(rs)
    zeros = (0,) * alg.n
    idkey = (zeros, alg.iperm, zeros)
    out = []
    for comp in sample.components:
        scalar = 0.0
        stray = 0.0
        for key, poly in comp.terms.items():
            for e, v in poly.items():
                if e[0] == 0:
                    continue
                if key == idkey and e == alg._hbar_mono():
                    scalar += v
                else:
                    stray = max(stray, abs(v))
        out.append((scalar, stray))
    return out
