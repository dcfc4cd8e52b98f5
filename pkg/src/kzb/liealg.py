"""Degree-truncated coefficient Lie algebra of the elliptic connection.

Generators: x_1..x_n and y_1..y_n (the coweight components of two linear
maps on the Cartan subalgebra) and one t per positive root, with
bidegrees (1,0), (0,1) and (1,1).  The defining relations:

    (tt)  [t_a, sum of t_b over the positive half of a rank-2
          subsystem containing a] = 0
    (xx)  [x(u), x(v)] = 0
    (yy)  [y(u), y(v)] = 0
    (yx)  [y(u), x(v)] = sum over positive roots g of g(v) g(u) t_g
    (tx)  [t_a, x(u)] = 0 whenever a(u) = 0
    (ty)  [t_a, y(u)] = 0 whenever a(u) = 0

The quotient is built bidegree by bidegree up to total degree N: the
free component in the Lyndon basis, the subspace spanned by all
generator-brackets of relations, echelonized exactly over Q, and the
surviving Lyndon words as the quotient basis.  Normal forms, brackets
(through cached structure tables), the Weyl action and the standard
derivations (d, X, Delta0, delta_{2m}) all stay in exact arithmetic.
"""

import heapq
from fractions import Fraction
from math import comb

from .freelie import (
    bracket_tensor,
    expand,
    lyndon_decompose,
    lyndon_words_upto,
    standard_factorization,
    substitute,
)
from .rootsys import rank2_subsystems


def default_truncation(rank):
    return 6 if rank <= 2 else 5


class LieElement:
    """Normal-form element: per-bidegree coordinate dicts over the
    quotient basis, exact Fractions."""

    __slots__ = ("qa", "coords")

    def __init__(self, qa, coords=None):
        self.qa = qa
        self.coords = coords if coords is not None else {}

    def copy(self):
        return LieElement(self.qa, {b: dict(v) for b, v in self.coords.items()})

    def is_zero(self):
        return all(not v for v in self.coords.values())

    def __eq__(self, other):
        return (self - other).is_zero()

    def __add__(self, other):
        out = {b: dict(v) for b, v in self.coords.items()}
        for b, v in other.coords.items():
            tgt = out.setdefault(b, {})
            for k, c in v.items():
                nv = tgt.get(k, 0) + c
                if nv:
                    tgt[k] = nv
                elif k in tgt:
                    del tgt[k]
        return LieElement(self.qa, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not c:
            return LieElement(self.qa)
        return LieElement(
            self.qa, {b: {k: c * v for k, v in vec.items()} for b, vec in self.coords.items()}
        )

    def __rmul__(self, c):
        return self.scale(c)

    def bracket(self, other):
        return self.qa.bracket(self, other)

    def homogeneous(self, bid):
        return LieElement(self.qa, {bid: dict(self.coords.get(bid, {}))})

    def support(self):
        return sorted(b for b, v in self.coords.items() if v)

    def __repr__(self):
        return self.qa.format_element(self)


class QuotientAlgebra:
    def __init__(self, rs, N=None, cap=6, drop=()):
        if N is None:
            N = default_truncation(rs.rank)
        if N > cap:
            raise ValueError("truncation %d exceeds cap %d" % (N, cap))
        self.drop = frozenset(drop)
        n = rs.rank
        npos = rs.num_positive()
        if (2 * n + npos) ** min(N, 5) > 5_000_000:
            raise ValueError("quotient build too large for %s at N=%d" % (rs.label, N))
        self.rs = rs
        self.N = N
        self.n = n
        self.npos = npos
        self.nletters = 2 * n + npos
        self.bdeg = [(1, 0)] * n + [(0, 1)] * n + [(1, 1)] * npos
        self.letter_names = (
            ["x%d" % (i + 1) for i in range(n)]
            + ["y%d" % (i + 1) for i in range(n)]
            + ["t[%s]" % rs.root_name(k) for k in range(npos)]
        )
        self._root_coeffs = [
            tuple(int(c) for c in rs.simple_coords(k)) for k in range(npos)
        ]
        self._build_basis()
        self._build_relations()
        self._build_echelon()
        self._tables = {}
        self._weyl_cache = {}
        self._deriv_word_cache = {}
        self._deriv_images_cache = {}

    # -- free basis ------------------------------------------------------

    def _word_bidegree(self, w):
        p = q = 0
        for letter in w:
            a, b = self.bdeg[letter]
            p += a
            q += b
        return (p, q)

    def _build_basis(self):
        self.basis = {}
        for w in lyndon_words_upto(self.nletters, self.N):
            bid = self._word_bidegree(w)
            if bid[0] + bid[1] <= self.N:
                self.basis.setdefault(bid, []).append(w)
        for bid in self.basis:
            self.basis[bid].sort()
        self.windex = {
            bid: {w: i for i, w in enumerate(words)} for bid, words in self.basis.items()
        }
        self.bidegrees = sorted(self.basis, key=lambda b: (b[0] + b[1], b[0]))

    def _coords_to_vec(self, coords, bid):
        idx = self.windex[bid]
        return {idx[w]: c for w, c in coords.items() if c}

    # -- defining relations ---------------------------------------------

    def _x(self, i):
        return {(i,): 1}

    def _y(self, i):
        return {(self.n + i,): 1}

    def _t(self, k):
        return {(2 * self.n + k,): 1}

    def _kernel_basis(self, k):
        """Integer coweight coordinate vectors u with root_k(u) = 0."""
        m = self._root_coeffs[k]
        j0 = next(j for j in range(self.n) if m[j])
        out = []
        for j in range(self.n):
            if j == j0:
                continue
            u = [0] * self.n
            u[j] = m[j0]
            u[j0] = -m[j]
            out.append(tuple(u))
        return out

    def _build_relations(self):
        n, npos = self.n, self.npos
        rels = {}
        labeled = []

        def add(kind, tensor):
            if kind in self.drop or not tensor:
                return
            labeled.append((kind, tensor))
            coords = lyndon_decompose(tensor)
            bid = self._word_bidegree(next(iter(coords)))
            if bid not in self.windex:
                # the whole component sits above the truncation degree
                return
            rels.setdefault(bid, []).append(self._coords_to_vec(coords, bid))

        for i in range(n):
            for j in range(i + 1, n):
                add("xx", bracket_tensor(self._x(i), self._x(j)))
                add("yy", bracket_tensor(self._y(i), self._y(j)))
        for i in range(n):
            for j in range(n):
                r = bracket_tensor(self._y(i), self._x(j))
                for k in range(npos):
                    m = self._root_coeffs[k]
                    c = m[j] * m[i]
                    if c:
                        r = _tensor_sub(r, {(2 * n + k,): c})
                add("yx", r)
        for k in range(npos):
            for u in self._kernel_basis(k):
                xu = {}
                yu = {}
                for j, c in enumerate(u):
                    if c:
                        xu[(j,)] = c
                        yu[(n + j,)] = c
                add("tx", bracket_tensor(self._t(k), xu))
                add("ty", bracket_tensor(self._t(k), yu))
        for psi in rank2_subsystems(self.rs):
            for a in psi.positive:
                r = {}
                for b in psi.positive:
                    if b != a:
                        r = _tensor_add(r, bracket_tensor(self._t(a), self._t(b)))
                add("tt", r)
        self.relations = rels
        self.relation_exprs = labeled

    # -- relation-ideal echelon ------------------------------------------

    def _reduce_vec(self, bid, vec):
        """Eliminate every pivot column; the residue is the normal form."""
        rows = self.pivots.get(bid, {})
        out = {}
        heap = list(vec)
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            f = vec.pop(c, 0)
            if not f:
                continue
            piv = rows.get(c)
            if piv is None:
                out[c] = f
                continue
            for k, v in piv.items():
                if k == c:
                    continue
                nv = vec.get(k, 0) - f * v
                if nv:
                    if k not in vec:
                        heapq.heappush(heap, k)
                    vec[k] = nv
                elif k in vec:
                    del vec[k]
        return out

    def _insert_row(self, bid, vec):
        """Reduce vec against the echelon; install the residue as a new
        pivot row (pivot = least column, normalized to 1)."""
        res = self._reduce_vec(bid, vec)
        if not res:
            return None
        c = min(res)
        inv = Fraction(1) / res[c]
        self.pivots[bid][c] = {k: v * inv for k, v in res.items()}
        return c

    def _build_echelon(self):
        self.pivots = {bid: {} for bid in self.bidegrees}
        gens = [(g,) + self.bdeg[g] for g in range(self.nletters)]
        for bid in self.bidegrees:
            rows = [dict(r) for r in self.relations.get(bid, [])]
            for g, a, b in gens:
                src = (bid[0] - a, bid[1] - b)
                src_rows = self.pivots.get(src)
                if not src_rows:
                    continue
                words = self.basis[src]
                for row in src_rows.values():
                    tensor = {}
                    for col, coeff in row.items():
                        for w, k in expand(words[col]).items():
                            wt = (g,) + w
                            nv = tensor.get(wt, 0) + coeff * k
                            if nv:
                                tensor[wt] = nv
                            elif wt in tensor:
                                del tensor[wt]
                        for w, k in expand(words[col]).items():
                            wt = w + (g,)
                            nv = tensor.get(wt, 0) - coeff * k
                            if nv:
                                tensor[wt] = nv
                            elif wt in tensor:
                                del tensor[wt]
                    rows.append(
                        self._coords_to_vec(lyndon_decompose(tensor), bid)
                    )
            rows.sort(key=len)
            for row in rows:
                self._insert_row(bid, row)
        self.qbasis = {
            bid: [i for i in range(len(self.basis[bid])) if i not in self.pivots[bid]]
            for bid in self.bidegrees
        }
        self.dims = {bid: len(self.qbasis[bid]) for bid in self.bidegrees}
        self._qpos = {
            bid: {col: j for j, col in enumerate(self.qbasis[bid])}
            for bid in self.bidegrees
        }

    # -- normal form and element constructors ----------------------------

    def zero(self):
        return LieElement(self)

    def normal_form(self, tensor):
        """Normal form of a free Lie expression given as a tensor-algebra
        dict (word -> coefficient); words may mix bidegrees."""
        by_bid = {}
        for w, c in tensor.items():
            if not c:
                continue
            bid = self._word_bidegree(w)
            if bid[0] + bid[1] > self.N:
                raise ValueError("expression exceeds truncation degree %d" % self.N)
            by_bid.setdefault(bid, {})[w] = c
        out = {}
        for bid, t in by_bid.items():
            vec = self._coords_to_vec(lyndon_decompose(t), bid)
            red = self._reduce_vec(bid, vec)
            if red:
                out[bid] = red
        return LieElement(self, out)

    def _unit(self, bid, col):
        return LieElement(self, {bid: {col: Fraction(1)}})

    def basis_elements(self, bid):
        return [self._unit(bid, c) for c in self.qbasis.get(bid, [])]

    def x(self, i):
        return self._unit((1, 0), self.windex[(1, 0)][(i,)])

    def y(self, i):
        return self._unit((0, 1), self.windex[(0, 1)][(self.n + i,)])

    def t(self, k):
        return self.normal_form(self._t(k))

    def x_of(self, u):
        """x(u) for u given in coweight coordinates."""
        out = self.zero()
        for i, c in enumerate(u):
            if c:
                out = out + self.x(i).scale(c)
        return out

    def y_of(self, u):
        out = self.zero()
        for i, c in enumerate(u):
            if c:
                out = out + self.y(i).scale(c)
        return out

    # -- bracket through structure tables --------------------------------

    def _table(self, bid1, bid2):
        key = (bid1, bid2)
        got = self._tables.get(key)
        if got is not None:
            return got
        tgt = (bid1[0] + bid2[0], bid1[1] + bid2[1])
        table = {}
        if tgt in self.basis:
            w1s = self.basis[bid1]
            w2s = self.basis[bid2]
            for i1, c1 in enumerate(self.qbasis[bid1]):
                for i2, c2 in enumerate(self.qbasis[bid2]):
                    t = bracket_tensor(expand(w1s[c1]), expand(w2s[c2]))
                    vec = self._coords_to_vec(lyndon_decompose(t), tgt)
                    red = self._reduce_vec(tgt, vec)
                    if red:
                        table[(i1, i2)] = {
                            self._qpos[tgt][c]: v for c, v in red.items()
                        }
        self._tables[key] = table
        return table

    def bracket(self, e1, e2):
        out = {}
        for bid1, v1 in e1.coords.items():
            pos1 = self._qpos[bid1]
            for bid2, v2 in e2.coords.items():
                tgt = (bid1[0] + bid2[0], bid1[1] + bid2[1])
                if tgt[0] + tgt[1] > self.N or tgt not in self.basis:
                    continue
                table = self._table(bid1, bid2)
                pos2 = self._qpos[bid2]
                tv = out.setdefault(tgt, {})
                qb = self.qbasis[tgt]
                for c1, f1 in v1.items():
                    i1 = pos1[c1]
                    for c2, f2 in v2.items():
                        ent = table.get((i1, pos2[c2]))
                        if not ent:
                            continue
                        f = f1 * f2
                        for j, v in ent.items():
                            col = qb[j]
                            nv = tv.get(col, 0) + f * v
                            if nv:
                                tv[col] = nv
                            elif col in tv:
                                del tv[col]
        return LieElement(self, {b: v for b, v in out.items() if v})

    # -- Weyl action -----------------------------------------------------

    def _letter_images(self, w):
        """Images of the generators under a Weyl element, as substitution
        lists for the free algebra."""
        images = []
        for i in range(self.n):
            lam = self.rs.coweights[i]
            coords = self.rs.coweight_coords(w.apply(lam))
            images.append([(j, coords[j]) for j in range(self.n) if coords[j]])
        for i in range(self.n):
            img = images[i]
            images.append([(self.n + j, c) for j, c in img])
        npos = self.npos
        for k in range(npos):
            j = w.perm[k]
            images.append([(2 * self.n + (j if j < npos else j - npos), 1)])
        return images

    def weyl_matrix(self, w, bid):
        key = (w.perm, bid)
        got = self._weyl_cache.get(key)
        if got is not None:
            return got
        images = self._letter_images(w)
        cols = []
        for c in self.qbasis[bid]:
            t = substitute(expand(self.basis[bid][c]), images)
            vec = self._coords_to_vec(lyndon_decompose(t), bid)
            red = self._reduce_vec(bid, vec)
            cols.append({self._qpos[bid][cc]: v for cc, v in red.items()})
        self._weyl_cache[key] = cols
        return cols

    def weyl_act(self, w, e):
        out = {}
        for bid, vec in e.coords.items():
            cols = self.weyl_matrix(w, bid)
            pos = self._qpos[bid]
            qb = self.qbasis[bid]
            tv = {}
            for c, f in vec.items():
                for j, v in cols[pos[c]].items():
                    col = qb[j]
                    nv = tv.get(col, 0) + f * v
                    if nv:
                        tv[col] = nv
                    elif col in tv:
                        del tv[col]
            if tv:
                out[bid] = tv
        return LieElement(self, out)

    # -- derivations -----------------------------------------------------

    def derivation_names(self):
        names = ["d", "X", "Delta0"]
        m = 2
        while m <= self.N - 2:
            names.append("delta%d" % m)
            m += 2
        return names

    def derivation_shift(self, name):
        if name == "d":
            return (0, 0)
        if name == "X":
            return (1, -1)
        if name == "Delta0":
            return (-1, 1)
        if name.startswith("delta"):
            return (int(name[5:]) + 1, 1)
        raise ValueError("unknown derivation %r" % (name,))

    def _deriv_images(self, name):
        got = self._deriv_images_cache.get(name)
        if got is not None:
            return got
        n, npos = self.n, self.npos
        img = [{} for _ in range(self.nletters)]
        if name == "d":
            for i in range(n):
                img[i] = {(i,): 1}
                img[n + i] = {(n + i,): -1}
        elif name == "X":
            for i in range(n):
                img[n + i] = {(i,): 1}
        elif name == "Delta0":
            for i in range(n):
                img[i] = {(n + i,): 1}
        elif name.startswith("delta"):
            two_m = int(name[5:])
            if two_m < 2 or two_m % 2:
                raise ValueError("unknown derivation %r" % (name,))
            half = Fraction(1, 2)
            for k in range(npos):
                cov = self.rs.coweight_coords(self.rs.coroot(k))
                xv = {(j,): half * cov[j] for j in range(n) if cov[j]}
                tk = self._t(k)
                chains = [tk]
                for _ in range(two_m):
                    chains.append(bracket_tensor(xv, chains[-1]))
                img[2 * n + k] = bracket_tensor(tk, chains[two_m])
                for i in range(n):
                    au = self._root_coeffs[k][i]
                    if not au:
                        continue
                    acc = {}
                    for p in range(two_m):
                        q = two_m - 1 - p
                        term = bracket_tensor(chains[p], chains[q])
                        sign = half * au * (-1) ** q
                        for w, c in term.items():
                            nv = acc.get(w, 0) + sign * c
                            if nv:
                                acc[w] = nv
                            elif w in acc:
                                del acc[w]
                    img[n + i] = _tensor_add(img[n + i], acc)
        else:
            raise ValueError("unknown derivation %r" % (name,))
        self._deriv_images_cache[name] = img
        return img

    def _deriv_word_tensor(self, name, w):
        key = (name, w)
        got = self._deriv_word_cache.get(key)
        if got is not None:
            return got
        if len(w) == 1:
            res = self._deriv_images(name)[w[0]]
        else:
            u, v = standard_factorization(w)
            res = _tensor_add(
                bracket_tensor(self._deriv_word_tensor(name, u), expand(v)),
                bracket_tensor(expand(u), self._deriv_word_tensor(name, v)),
            )
        self._deriv_word_cache[key] = res
        return res

    def derivation(self, name, e, truncate=False):
        """Apply a standard derivation to a normal-form element.

        With truncate=False a nonzero image beyond the truncation degree
        raises; with truncate=True such components are dropped.
        """
        a, b = self.derivation_shift(name)
        out = self.zero()
        for bid, vec in e.coords.items():
            tgt = (bid[0] + a, bid[1] + b)
            overflow = tgt[0] + tgt[1] > self.N
            words = self.basis[bid]
            for c, f in vec.items():
                t = self._deriv_word_tensor(name, words[c])
                if not t:
                    continue
                if overflow:
                    if truncate:
                        continue
                    raise ValueError(
                        "image of bidegree %r under %s exceeds truncation" % (bid, name)
                    )
                out = out + self.normal_form(t).scale(f)
        return out

    def derivation_free(self, name, tensor, truncate=False):
        """Leibniz image of a free Lie expression (tensor dict), reduced
        to normal form.  Used to check that a derivation preserves the
        relation ideal: the image of a defining relation must vanish."""
        out = self.zero()
        a, b = self.derivation_shift(name)
        by_bid = {}
        for w, c in tensor.items():
            if c:
                by_bid.setdefault(self._word_bidegree(w), {})[w] = c
        for bid, t in by_bid.items():
            if bid[0] + bid[1] + a + b > self.N:
                if truncate:
                    continue
                raise ValueError(
                    "image of bidegree %r under %s exceeds truncation" % (bid, name)
                )
            for w, c in lyndon_decompose(t).items():
                dt = self._deriv_word_tensor(name, w)
                if dt:
                    out = out + self.normal_form(dt).scale(c)
        return out

    def verify_relation_preservation(self, name, truncate=True):
        """Apply a derivation to every defining relation whose image fits
        the truncation; returns (checked, failures)."""
        a, b = self.derivation_shift(name)
        checked = 0
        failures = []
        for kind, tensor in self.relation_exprs:
            bid = self._word_bidegree(next(iter(tensor)))
            if bid[0] + bid[1] + a + b > self.N:
                if truncate:
                    continue
            img = self.derivation_free(name, tensor)
            checked += 1
            if not img.is_zero():
                failures.append(kind)
        return checked, failures

    def verify_d_relations(self):
        """Operator identities of the derivation Lie algebra, applied to
        every quotient basis element whose image chain stays inside the
        truncation.  Returns {relation: (elements checked, failures)}."""

        report = {}

        def run(label, terms, total_shift):
            checked = 0
            bad = 0
            for bid in self.bidegrees:
                if bid[0] + bid[1] + total_shift > self.N:
                    continue
                for e in self.basis_elements(bid):
                    acc = self.zero()
                    for coeff, ops in terms:
                        img = e
                        for name in reversed(ops):
                            img = self.derivation(name, img)
                        acc = acc + img.scale(coeff)
                    checked += 1
                    if not acc.is_zero():
                        bad += 1
            report[label] = (checked, bad)

        run("[d,X]-2X", [(1, ("d", "X")), (-1, ("X", "d")), (-2, ("X",))], 0)
        run(
            "[d,Delta0]+2Delta0",
            [(1, ("d", "Delta0")), (-1, ("Delta0", "d")), (2, ("Delta0",))],
            0,
        )
        run("[X,Delta0]-d", [(1, ("X", "Delta0")), (-1, ("Delta0", "X")), (-1, ("d",))], 0)
        m = 2
        while m <= self.N - 2:
            delta = "delta%d" % m
            run(
                "[%s,X]" % delta,
                [(1, (delta, "X")), (-1, ("X", delta))],
                m + 2,
            )
            run(
                "[d,%s]-%d%s" % (delta, m, delta),
                [(1, ("d", delta)), (-1, (delta, "d")), (-m, (delta,))],
                m + 2,
            )
            terms = []
            for k in range(m + 2):
                ops = ("Delta0",) * k + (delta,) + ("Delta0",) * (m + 1 - k)
                terms.append(((-1) ** k * comb(m + 1, k), ops))
            run("(ad Delta0)^%d(%s)" % (m + 1, delta), terms, m + 2)
            m += 2
        return report

    def verify_jacobi(self, samples=200, seed=0):
        """Jacobi identity on random triples of quotient basis elements
        whose degrees fit; returns (checked, failures)."""
        import random

        rng = random.Random(seed)
        pool = [
            (bid, c)
            for bid in self.bidegrees
            for c in self.qbasis[bid]
            if bid[0] + bid[1] <= self.N - 2
        ]
        checked = 0
        bad = 0
        while checked < samples:
            (b1, c1), (b2, c2), (b3, c3) = (rng.choice(pool) for _ in range(3))
            tot = b1[0] + b2[0] + b3[0] + b1[1] + b2[1] + b3[1]
            if tot > self.N:
                continue
            ea, eb, ec = self._unit(b1, c1), self._unit(b2, c2), self._unit(b3, c3)
            acc = (
                ea.bracket(eb.bracket(ec))
                + eb.bracket(ec.bracket(ea))
                + ec.bracket(ea.bracket(eb))
            )
            checked += 1
            if not acc.is_zero():
                bad += 1
        return checked, bad

    # -- reporting -------------------------------------------------------

    def dimension_table(self):
        return [(bid, self.dims[bid]) for bid in self.bidegrees]

    def word_str(self, w):
        if len(w) == 1:
            return self.letter_names[w[0]]
        u, v = standard_factorization(w)
        return "[%s,%s]" % (self.word_str(u), self.word_str(v))

    def format_element(self, e):
        parts = []
        for bid in sorted(e.coords):
            words = self.basis[bid]
            for c in sorted(e.coords[bid]):
                f = e.coords[bid][c]
                parts.append("%s*%s" % (f, self.word_str(words[c])))
        return " + ".join(parts) if parts else "0"


def _tensor_add(a, b):
    out = dict(a)
    for w, c in b.items():
        nv = out.get(w, 0) + c
        if nv:
            out[w] = nv
        elif w in out:
            del out[w]
    return out


def _tensor_sub(a, b):
    out = dict(a)
    for w, c in b.items():
        nv = out.get(w, 0) - c
        if nv:
            out[w] = nv
        elif w in out:
            del out[w]
    return out


_build_cache = {}


def build_quotient(rs, N=None, cap=6, drop=()):
    """The truncated quotient algebra for a root system, cached per
    (type, truncation, dropped relation families)."""
    if N is None:
        N = default_truncation(rs.rank)
    key = (rs.label, rs.rank, N, frozenset(drop))
    if key not in _build_cache:
        _build_cache[key] = QuotientAlgebra(rs, N, cap=cap, drop=drop)
    return _build_cache[key]
