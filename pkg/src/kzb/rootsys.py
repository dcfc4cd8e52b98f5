"""Finite reduced crystallographic root systems over the rationals.

Vectors are tuples of fractions.Fraction in an ambient rational
coordinate space.  A root is stored as its ambient vector; used as a
linear functional it acts through the invariant form,

    alpha(v) = (alpha | v).

The form is a rational multiple of the dot product, scaled per type so
that long roots have squared length 2.  That normalization keeps every
coordinate and every pairing rational, including the coweight basis
dual to the simple roots.
"""

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

TYPES = ("A", "B", "C", "D", "E", "F", "G")


def vec(*entries):
    return tuple(Fraction(e) for e in entries)


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a):
    c = Fraction(c)
    return tuple(c * x for x in a)


def is_zero(a):
    return all(x == 0 for x in a)


class Rank2Subsystem:
    """A rank-2 subsystem Psi = (Z alpha + Z beta) meet Phi.

    `indices` lists all member roots, `positive` the members that are
    positive in the ambient system.  Both are sorted tuples of root
    indices into RootSystem.roots.
    """

    def __init__(self, indices, positive):
        self.indices = tuple(indices)
        self.positive = tuple(positive)

    def __eq__(self, other):
        return isinstance(other, Rank2Subsystem) and self.indices == other.indices

    def __hash__(self):
        return hash(self.indices)

    def __len__(self):
        return len(self.indices)

    def __repr__(self):
        return "Rank2Subsystem(size=%d)" % len(self.indices)


class WeylElement:
    """A Weyl group element: orthogonal matrix, reduced-ish word, and the
    permutation it induces on the root list."""

    __slots__ = ("matrix", "word", "perm")

    def __init__(self, matrix, word, perm):
        self.matrix = matrix
        self.word = word
        self.perm = perm

    def apply(self, v):
        return mat_apply(self.matrix, v)

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return "WeylElement(word=%r)" % (list(self.word),)


def mat_apply(m, v):
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in m)


def mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def identity_matrix(n):
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def solve_exact(rows, rhs):
    """Solve a linear system with Fraction entries by Gauss elimination.

    `rows` is a list of row tuples, `rhs` the right-hand sides.  Returns
    the unique solution of the least-squares-free square/overdetermined
    consistent system, or None when inconsistent.
    """
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    nrows = len(m)
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if m[i][ncols] != 0:
            return None
    if len(pivots) < ncols:
        return None
    sol = [ZERO] * ncols
    for i, c in enumerate(pivots):
        sol[c] = m[i][ncols]
    return tuple(sol)


def _simple_roots(label, rank):
    """Simple root vectors and form scale for one irreducible type.

    Returns (ambient_dim, scale, simples) where the invariant form is
    scale * dot.
    """
    if label == "A":
        if rank < 1:
            raise ValueError("A_n needs rank >= 1")
        dim = rank + 1
        simples = []
        for i in range(rank):
            v = [ZERO] * dim
            v[i] = ONE
            v[i + 1] = -ONE
            simples.append(tuple(v))
        return dim, ONE, simples
    if label == "B":
        if rank < 2:
            raise ValueError("B_n needs rank >= 2")
        simples = []
        for i in range(rank - 1):
            v = [ZERO] * rank
            v[i] = ONE
            v[i + 1] = -ONE
            simples.append(tuple(v))
        v = [ZERO] * rank
        v[rank - 1] = ONE
        simples.append(tuple(v))
        return rank, ONE, simples
    if label == "C":
        if rank < 2:
            raise ValueError("C_n needs rank >= 2")
        simples = []
        for i in range(rank - 1):
            v = [ZERO] * rank
            v[i] = ONE
            v[i + 1] = -ONE
            simples.append(tuple(v))
        v = [ZERO] * rank
        v[rank - 1] = Fraction(2)
        simples.append(tuple(v))
        return rank, HALF, simples
    if label == "D":
        if rank < 3:
            raise ValueError("D_n needs rank >= 3")
        simples = []
        for i in range(rank - 1):
            v = [ZERO] * rank
            v[i] = ONE
            v[i + 1] = -ONE
            simples.append(tuple(v))
        v = [ZERO] * rank
        v[rank - 2] = ONE
        v[rank - 1] = ONE
        simples.append(tuple(v))
        return rank, ONE, simples
    if label == "E":
        if rank not in (6, 7, 8):
            raise ValueError("E_n needs rank in {6,7,8}")
        a1 = vec(HALF, -HALF, -HALF, -HALF, -HALF, -HALF, -HALF, HALF)
        a2 = vec(1, 1, 0, 0, 0, 0, 0, 0)
        rest = []
        for i in range(6):
            v = [ZERO] * 8
            v[i] = -ONE
            v[i + 1] = ONE
            rest.append(tuple(v))
        simples = [a1, a2] + rest[: rank - 2]
        return 8, ONE, simples
    if label == "F":
        if rank != 4:
            raise ValueError("F_4 has rank 4")
        simples = [
            vec(0, 1, -1, 0),
            vec(0, 0, 1, -1),
            vec(0, 0, 0, 1),
            vec(HALF, -HALF, -HALF, -HALF),
        ]
        return 4, ONE, simples
    if label == "G":
        if rank != 2:
            raise ValueError("G_2 has rank 2")
        simples = [vec(-2, 1, 1), vec(1, -1, 0)]
        return 3, Fraction(1, 3), simples
    raise ValueError("unknown type label %r" % (label,))


class RootSystem:
    """An irreducible root system with exact rational data.

    Attributes:
        label, rank:  the Cartan type.
        ambient_dim:  dimension of the coordinate space.
        scale:        the invariant form is scale * (dot product).
        simple:       simple root vectors alpha_1..alpha_n.
        roots:        all roots, positives first then their negatives.
        positive:     indices of the positive roots (0..|Phi+|-1).
        coweights:    vectors lambda_i in span(Phi) with
                      alpha_j(lambda_i) = delta_ij.
    """

    def __init__(self, label, rank):
        label = label.upper()
        if label not in TYPES:
            raise ValueError("unknown type label %r" % (label,))
        self.label = label
        self.rank = rank
        dim, scale, simples = _simple_roots(label, rank)
        self.ambient_dim = dim
        self.scale = scale
        self.simple = list(simples)
        self._close_roots()
        self._index = {r: i for i, r in enumerate(self.roots)}
        self._simple_coords = [self._expand_simple(r) for r in self.roots]
        self._build_coweights()
        self._check_crystallographic()

    # -- basic form operations -------------------------------------------

    def form(self, a, b):
        """The invariant symmetric form (a|b)."""
        return self.scale * sum(x * y for x, y in zip(a, b))

    def sq(self, a):
        return self.form(a, a)

    def pair(self, alpha, v):
        """alpha(v) for a root alpha used as a linear functional."""
        return self.form(alpha, v)

    def coroot(self, alpha):
        """alpha_vee = 2 alpha / (alpha|alpha), as a vector in span(Phi)."""
        if isinstance(alpha, int):
            alpha = self.roots[alpha]
        return vscale(Fraction(2) / self.sq(alpha), alpha)

    def int_pair(self, beta, alpha):
        """The integer <beta, alpha_vee> = 2 (beta|alpha) / (alpha|alpha)."""
        if isinstance(alpha, int):
            alpha = self.roots[alpha]
        if isinstance(beta, int):
            beta = self.roots[beta]
        val = Fraction(2) * self.form(beta, alpha) / self.sq(alpha)
        if val.denominator != 1:
            raise ValueError("non-integral pairing")
        return int(val)

    def reflect(self, alpha, v):
        """s_alpha(v) = v - alpha(v) alpha_vee."""
        if isinstance(alpha, int):
            alpha = self.roots[alpha]
        c = Fraction(2) * self.form(alpha, v) / self.sq(alpha)
        return vsub(v, vscale(c, alpha))

    def reflection_matrix(self, alpha):
        if isinstance(alpha, int):
            alpha = self.roots[alpha]
        n = self.ambient_dim
        cols = []
        for k in range(n):
            e = tuple(ONE if j == k else ZERO for j in range(n))
            cols.append(self.reflect(alpha, e))
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    # -- construction ----------------------------------------------------

    def _close_roots(self):
        seen = set(self.simple)
        frontier = list(self.simple)
        while frontier:
            new = []
            for r in frontier:
                for s in self.simple:
                    img = self.reflect(s, r)
                    if img not in seen:
                        seen.add(img)
                        new.append(img)
            frontier = new
        pos = []
        for r in seen:
            coords = self._expand_simple(r)
            if coords is None:
                raise ValueError("root outside simple span")
            if all(c >= 0 for c in coords):
                pos.append((sum(coords), coords, r))
        pos.sort()
        self.roots = [r for (_, _, r) in pos] + [vscale(-1, r) for (_, _, r) in pos]
        self.positive = list(range(len(pos)))

    def _expand_simple(self, r):
        rows = [tuple(self.simple[j][i] for j in range(self.rank))
                for i in range(self.ambient_dim)]
        return solve_exact(rows, list(r))

    def _build_coweights(self):
        # lambda_i = sum_k c_k alpha_k with alpha_j(lambda_i) = delta_ij
        gram = [tuple(self.form(a, b) for b in self.simple) for a in self.simple]
        self.coweights = []
        for i in range(self.rank):
            rhs = [ONE if j == i else ZERO for j in range(self.rank)]
            c = solve_exact(gram, rhs)
            lam = tuple(
                sum(c[k] * self.simple[k][d] for k in range(self.rank))
                for d in range(self.ambient_dim)
            )
            self.coweights.append(lam)

    def _check_crystallographic(self):
        for i in self.positive:
            for j in self.positive:
                self.int_pair(i, j)

    # -- lookups ---------------------------------------------------------

    def index(self, r):
        return self._index[tuple(r)]

    def simple_coords(self, i):
        """Coordinates of roots[i] in the simple-root basis (integers)."""
        return self._simple_coords[i]

    def root_name(self, i):
        coords = self._simple_coords[i]
        out = ""
        for k, c in enumerate(coords):
            c = int(c)
            if c == 0:
                continue
            sign = "-" if c < 0 else ("+" if out else "")
            mag = "" if abs(c) == 1 else str(abs(c))
            out += "%s%sa%d" % (sign, mag, k + 1)
        return out or "0"

    def coweight_coords(self, v):
        """Coordinates of v in the coweight basis: (alpha_1(v), ...)."""
        return tuple(self.pair(a, v) for a in self.simple)

    def from_coweight_coords(self, coords):
        out = tuple(ZERO for _ in range(self.ambient_dim))
        for c, lam in zip(coords, self.coweights):
            out = vadd(out, vscale(c, lam))
        return out

    def highest_root(self):
        return self.roots[self.positive[-1]]

    def num_positive(self):
        return len(self.positive)

    def long_squared(self):
        return max(self.sq(self.roots[i]) for i in self.positive)

    def orbit_key(self, alpha):
        """Key identifying the W-orbit of a root (its squared length)."""
        if isinstance(alpha, int):
            alpha = self.roots[alpha]
        return self.sq(alpha)

    def orbit_keys(self):
        keys = sorted({self.orbit_key(i) for i in self.positive})
        return keys


def build_root_system(label, rank=None):
    """Build a root system from a type label.

    Accepts build_root_system("B", 2) or build_root_system("B2").
    """
    if rank is None:
        label = label.strip()
        if len(label) < 2:
            raise ValueError("need a rank, e.g. 'B2'")
        rank = int(label[1:])
        label = label[0]
    return RootSystem(label, rank)


def weyl_group(rs, order_bound=1152):
    """All Weyl group elements by breadth-first closure over the simple
    reflections.  Raises if the group order exceeds order_bound."""
    n = rs.ambient_dim
    gens = []
    for i in range(rs.rank):
        m = rs.reflection_matrix(rs.simple[i])
        gens.append(m)
    ident = identity_matrix(n)

    def perm_of(m):
        return tuple(rs.index(mat_apply(m, r)) for r in rs.roots)

    elems = [WeylElement(ident, (), perm_of(ident))]
    seen = {ident: 0}
    frontier = [elems[0]]
    while frontier:
        new = []
        for el in frontier:
            for i, g in enumerate(gens):
                m = mat_mul(g, el.matrix)
                if m not in seen:
                    if len(seen) >= order_bound:
                        raise ValueError(
                            "Weyl group larger than order_bound=%d" % order_bound
                        )
                    w = WeylElement(m, (i,) + el.word, perm_of(m))
                    seen[m] = len(elems)
                    elems.append(w)
                    new.append(w)
        frontier = new
    return elems


def omega(rs, u, v):
    """The auxiliary vector omega(u_vee, v) attached to non-proportional
    roots u, v.

    It is the unique vector in span{u, v} orthogonal to v such that
    u_vee + omega(u_vee, v) is orthogonal to u.
    """
    if isinstance(u, int):
        u = rs.roots[u]
    if isinstance(v, int):
        v = rs.roots[v]
    uu = rs.sq(u)
    vv = rs.sq(v)
    uv = rs.form(u, v)
    den = uu * vv - uv * uv
    if den == 0:
        raise ValueError("omega undefined for proportional roots")
    return vadd(vscale(Fraction(-2) * vv / den, u), vscale(Fraction(2) * uv / den, v))


def _lattice_roots(rs, a, b):
    """Indices of roots in (Z a + Z b) meet Phi for non-proportional
    roots a, b."""
    if isinstance(a, int):
        a = rs.roots[a]
    if isinstance(b, int):
        b = rs.roots[b]
    aa = rs.sq(a)
    bb = rs.sq(b)
    ab = rs.form(a, b)
    den = aa * bb - ab * ab
    if den == 0:
        raise ValueError("roots are proportional")
    out = []
    for i, g in enumerate(rs.roots):
        ag = rs.form(a, g)
        bg = rs.form(b, g)
        m = (ag * bb - bg * ab) / den
        nn = (bg * aa - ag * ab) / den
        if m.denominator != 1 or nn.denominator != 1:
            continue
        cand = vadd(vscale(m, a), vscale(nn, b))
        if cand == g:
            out.append(i)
    return tuple(sorted(out))


def rank2_subsystems(rs):
    """All distinct rank-2 subsystems Psi = (Z alpha + Z beta) meet Phi,
    over pairs of non-proportional roots."""
    seen = {}
    npos = rs.num_positive()
    for i in range(npos):
        for j in range(i + 1, npos):
            a = rs.roots[i]
            b = rs.roots[j]
            if rs.sq(a) * rs.sq(b) == rs.form(a, b) ** 2:
                continue
            idx = _lattice_roots(rs, a, b)
            if idx not in seen:
                pos = tuple(k for k in idx if k < npos)
                seen[idx] = Rank2Subsystem(idx, pos)
    return [seen[k] for k in sorted(seen)]


def s_set(rs, psi, alpha):
    """S_psi(alpha): roots beta with (Z alpha + Z beta) meet Phi = psi.

    alpha may be a root index or vector; psi a Rank2Subsystem.  Roots
    proportional to alpha are excluded (the partition of Phi is the
    disjoint union of the S_psi(alpha) together with {alpha, -alpha}).
    """
    if isinstance(alpha, int):
        alpha = rs.roots[alpha]
    out = []
    for i, b in enumerate(rs.roots):
        if rs.sq(alpha) * rs.sq(b) == rs.form(alpha, b) ** 2:
            continue
        if _lattice_roots(rs, alpha, b) == psi.indices:
            out.append(i)
    return tuple(out)


def dual_coxeter(rs):
    """The dual Coxeter number 1 + sum of the coefficients of the highest
    root's coroot in the simple-coroot basis."""
    theta = rs.highest_root()
    theta_v = rs.coroot(theta)
    rows = [
        tuple(rs.coroot(rs.simple[j])[i] for j in range(rs.rank))
        for i in range(rs.ambient_dim)
    ]
    g = solve_exact(rows, list(theta_v))
    if g is None:
        raise ValueError("highest coroot outside coroot span")
    total = sum(g)
    if total.denominator != 1:
        raise ValueError("non-integral marks")
    return 1 + int(total)


def braid_order(rs, i, j):
    """Order m_ij of s_i s_j in the Weyl group, from the Cartan integers."""
    if i == j:
        return 1
    n = rs.int_pair(rs.simple[i], rs.simple[j]) * rs.int_pair(rs.simple[j], rs.simple[i])
    return {0: 2, 1: 3, 2: 4, 3: 6}[n]


def inversion_set(rs, w):
    """Indices of positive roots sent to negatives by w^{-1}: Phi+ meet w(Phi-).

    w is a WeylElement; uses the root permutation."""
    npos = rs.num_positive()
    inv = [0] * len(rs.roots)
    for src, dst in enumerate(w.perm):
        inv[dst] = src
    return tuple(i for i in range(npos) if inv[i] >= npos)
