"""Parallel transport of the flat connections and the braid-group data
it generates.

Two transport targets share one integrator.  The Weyl-orbit matrix
connection gives finite monodromy matrices; around the reflection
divisors these satisfy a quadratic relation with scalars t_i =
exp(-2 pi i c_i / (alpha_i, alpha_i)) and the braid relations of the
Weyl group (hecke_check).  The degree-truncated quotient, fed through
the left-regular action of its enveloping algebra, gives nilpotent
group-like transports whose logarithms have prescribed lowest-degree
terms: -y(lam_i) for a lattice loop, 2 pi i x(lam_i) - tau y(lam_i) for
a tau-lattice loop, 2 pi i t_alpha for a small circle around one
divisor (leading_term_check).

Paths live in coweight coordinates like every torus point in this
package.  A path records its closure (lattice shift or reflection) and
the bundle multiplier that identifies the endpoint fiber with the base
fiber; transport itself integrates F' = (sum_i K_i zdot_i) F and leaves
applying the multiplier to the caller-facing drivers.

Orientation conventions (reflection factor applied on the left of the
transported matrix, upper semicircular detours) are pinned by the
quadratic relation itself; see the braid_arc docstring.
"""

import cmath
import math
import random
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from . import connection as _conn
from .connection import TWO_PI_I, divisor_distance, kzb_sample
from .dunkl import dunkl_sample_direct
from .rootsys import braid_order

# ---------------------------------------------------------------------------
# paths


class PathSpec:
    """A piecewise-smooth path in coweight coordinates.

    segments: list of (z(t), zdot(t)) callable pairs on [0, 1].
    closure: None, ("lattice", shift-tuple) or ("weyl", root-index).
    multiplier: matrix identifying the endpoint fiber with the base
    fiber, or None when the identification is trivial.
    """

    __slots__ = ("kind", "rs", "mp", "base", "segments", "closure", "multiplier", "floor")

    def __init__(self, kind, rs, mp, base, segments, closure=None, multiplier=None, floor=1.5e-2):
        self.kind = kind
        self.rs = rs
        self.mp = mp
        self.base = tuple(complex(v) for v in base)
        self.segments = segments
        self.closure = closure
        self.multiplier = multiplier
        self.floor = floor

    def endpoint(self):
        zf, _ = self.segments[-1]
        return tuple(zf(1.0))


def _coroot_coords(rs, k):
    """Coweight coordinates of the coroot of positive root k."""
    co = rs.coroot(k)
    return tuple(rs.pair(a, co) for a in rs.simple)


def _straight(z0, z1):
    z0 = tuple(complex(v) for v in z0)
    dvec = tuple(b - a for a, b in zip(z0, z1))

    def zf(t, z0=z0, dvec=dvec):
        return tuple(a + t * d for a, d in zip(z0, dvec))

    def zd(t, dvec=dvec):
        return dvec

    return (zf, zd)


def x_loop(rs, mp, z0, i, **kw):
    """Lattice translation z0 -> z0 + e_i; closed on the torus."""
    shift = tuple(1.0 if j == i else 0.0 for j in range(rs.rank))
    z1 = tuple(a + s for a, s in zip(z0, shift))
    return PathSpec("x_loop(%d)" % i, rs, mp, z0, [_straight(z0, z1)],
                    closure=("lattice", shift), **kw)


def y_loop(rs, mp, z0, i, multiplier=None, **kw):
    """tau-lattice translation z0 -> z0 + tau e_i."""
    shift = tuple(mp.tau if j == i else 0.0 for j in range(rs.rank))
    z1 = tuple(a + s for a, s in zip(z0, shift))
    return PathSpec("y_loop(%d)" % i, rs, mp, z0, [_straight(z0, z1)],
                    closure=("lattice", shift), multiplier=multiplier, **kw)


def _kernel_vector(rs, k):
    """An integer coordinate direction annihilated by root k."""
    m = tuple(int(c) for c in rs.simple_coords(k))
    j0 = next(j for j in range(rs.rank) if m[j])
    j1 = next((j for j in range(rs.rank) if j != j0), None)
    if j1 is None:
        return (0,) * rs.rank
    u = [0] * rs.rank
    u[j1] = m[j0]
    u[j0] = -m[j1]
    return tuple(u)


def t_loop(rs, mp, z0, k, radius=0.12, slide=0.0, **kw):
    """Full circle of the given radius in the alpha_k(z) coordinate
    around the divisor alpha_k(z) = 0, holding the complementary
    coordinates fixed.

    The center is the projection of z0 onto the divisor along the
    coroot, displaced along the divisor by slide times an integer
    kernel direction; for a non-simple root the bare projection can sit
    close to another wall, and the caller searches over slides."""
    m = tuple(int(c) for c in rs.simple_coords(k))
    a0 = sum(c * complex(v) for c, v in zip(m, z0))
    cr = _coroot_coords(rs, k)
    kv = _kernel_vector(rs, k)
    zc = tuple(
        complex(v) - (a0 / 2.0) * complex(c) + slide * complex(u)
        for v, c, u in zip(z0, cr, kv)
    )

    def zf(t, zc=zc, cr=cr, r=radius):
        w = (r / 2.0) * cmath.exp(TWO_PI_I * t)
        return tuple(v + w * complex(c) for v, c in zip(zc, cr))

    def zd(t, cr=cr, r=radius):
        w = (r / 2.0) * TWO_PI_I * cmath.exp(TWO_PI_I * t)
        return tuple(w * complex(c) for c in cr)

    start = zf(0.0)
    return PathSpec("t_loop(%d)" % k, rs, mp, start, [(zf, zd)],
                    closure=None, **kw)


def braid_arc(rs, mp, z0, i, multiplier=None, orientation=-1, **kw):
    """Half-turn path z0 -> s_i(z0) for the i-th simple reflection:
    z(psi) = z0 + (e^{+-i pi psi} - 1) (alpha_i(z0)/2) alpha_i_vee, so
    the alpha_i(z) coordinate traces an exact semicircle around 0.

    With the default clockwise detour (orientation -1) and the
    reflection matrix applied on the left of the transport, S = R P
    satisfies (S - t)(S + 1/t) = 0 with t = e^{-2 pi i c/(alpha,alpha)}
    and the braid relations; the counterclockwise detour realizes the
    inverse generator, and the order P R breaks the braid relation.
    Both facts are pinned numerically in the tests."""
    k = rs.index(rs.simple[i])
    m = tuple(int(c) for c in rs.simple_coords(k))
    a0 = sum(c * complex(v) for c, v in zip(m, z0))
    cr = _coroot_coords(rs, k)
    sgn = 1.0 if orientation >= 0 else -1.0

    def zf(t, z0=z0, cr=cr, a0=a0, sgn=sgn):
        w = (cmath.exp(sgn * 1j * math.pi * t) - 1.0) * (a0 / 2.0)
        return tuple(complex(v) + w * complex(c) for v, c in zip(z0, cr))

    def zd(t, cr=cr, a0=a0, sgn=sgn):
        w = sgn * 1j * math.pi * cmath.exp(sgn * 1j * math.pi * t) * (a0 / 2.0)
        return tuple(w * complex(c) for c in cr)

    return PathSpec("braid(%d)" % i, rs, mp, z0, [(zf, zd)],
                    closure=("weyl", k), multiplier=multiplier, **kw)


def polyline(rs, mp, points, closure=None, **kw):
    """Straight segments through the listed coordinate tuples."""
    segs = [_straight(a, b) for a, b in zip(points, points[1:])]
    return PathSpec("composite", rs, mp, points[0], segs, closure=closure, **kw)


def validate_path(path, samples=80):
    """Divisor margin along a parameter grid, and closure consistency."""
    worst = math.inf
    for zf, _ in path.segments:
        for j in range(samples + 1):
            d = divisor_distance(path.rs, zf(j / samples), path.mp)
            if d < worst:
                worst = d
    if worst < path.floor:
        raise ValueError(
            "path %s passes within %.3g of a divisor (floor %.3g)"
            % (path.kind, worst, path.floor)
        )
    end = path.endpoint()
    if path.closure is None:
        want = path.base
    elif path.closure[0] == "lattice":
        want = tuple(a + s for a, s in zip(path.base, path.closure[1]))
    else:
        k = path.closure[1]
        rs = path.rs
        m = tuple(int(c) for c in rs.simple_coords(k))
        bval = sum(c * v for c, v in zip(m, path.base))
        B = [rs.int_pair(rs.simple[j], k) for j in range(rs.rank)]
        want = tuple(v - B[j] * bval for j, v in enumerate(path.base))
    err = max(abs(a - b) for a, b in zip(end, want))
    if err > 1e-9:
        raise ValueError("path endpoint misses declared closure by %.3g" % err)
    return worst


# ---------------------------------------------------------------------------
# transport


class TransportResult:
    __slots__ = ("value", "error", "steps", "kind")

    def __init__(self, value, error, steps, kind):
        self.value = value
        self.error = error
        self.steps = steps
        self.kind = kind


def _commutator_residual(mats):
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            c = mats[i] @ mats[j] - mats[j] @ mats[i]
            worst = max(worst, float(np.abs(c).max()))
    return worst


def _integrate(sampler, path, rtol, state0):
    shape = state0.shape
    state = state0.astype(complex).reshape(-1)
    steps = 0
    for zf, zd in path.segments:

        def rhs(t, y, zf=zf, zd=zd):
            mats = sampler(zf(t))
            zdot = zd(t)
            M = None
            for Ai, vi in zip(mats, zdot):
                if vi == 0:
                    continue
                M = Ai * vi if M is None else M + Ai * vi
            Y = y.reshape(shape)
            if M is None:
                return np.zeros_like(y)
            return (M @ Y).reshape(-1)

        sol = solve_ivp(rhs, (0.0, 1.0), state, method="RK45",
                        rtol=rtol, atol=rtol * 1e-3, max_step=1e-2)
        if not sol.success:
            raise RuntimeError(
                "transport along %s failed: %s" % (path.kind, sol.message)
            )
        state = sol.y[:, -1]
        steps += len(sol.t) - 1
    return state.reshape(shape), steps


def transport(sampler, path, tol=1e-8, state0=None, check_curvature=True):
    """Solve F' = (sum_i A_i(z) zdot_i) F along the path.

    sampler(z) returns the component matrices.  The result is the raw
    path-ordered transport; closure multipliers are not applied here.
    The reported error is the difference against a finer integration."""
    validate_path(path)
    if check_curvature:
        limit = 10.0 * max(tol, 1e-11)
        zf, _ = path.segments[0]
        for t in (0.0, 0.5, 1.0):
            resid = _commutator_residual(sampler(zf(t)))
            if resid > limit:
                raise RuntimeError(
                    "sampler is not flat along %s: commutator residual %.3g"
                    % (path.kind, resid)
                )
    if state0 is None:
        probe = sampler(path.base)
        state0 = np.eye(probe[0].shape[0], dtype=complex)
    coarse, steps = _integrate(sampler, path, tol, state0)
    fine, fsteps = _integrate(sampler, path, tol / 8.0, state0)
    err = float(np.abs(fine - coarse).max())
    return TransportResult(fine, err, steps + fsteps, path.kind)


def matrix_sampler(rep, mp):
    """Connection components of the orbit representation at z."""

    def sampler(z):
        return dunkl_sample_direct(rep, z, mp, check_regular=False).A

    return sampler


# ---------------------------------------------------------------------------
# base points


def choose_base_point(rs, mp, scale=0.45, slope=0.7, floor=2e-2):
    """A regular point with all root values small with positive real and
    imaginary parts of a common argument, so that half-turn detours
    toward any reflected point stay away from every divisor."""
    v = tuple(1.0 / (1.0 + 0.618 * j) for j in range(rs.rank))
    vals = []
    for k in range(rs.num_positive()):
        m = rs.simple_coords(k)
        vals.append(sum(float(c) * w for c, w in zip(m, v)))
    top = max(vals)
    for shrink in (1.0, 0.8, 0.64, 0.5):
        eps = shrink * scale / (abs(1 + 1j * slope) * top)
        z0 = tuple(eps * (1 + 1j * slope) * w for w in v)
        if divisor_distance(rs, z0, mp) >= floor:
            return z0
    raise ValueError("no usable base point at scale %.3g" % scale)


# ---------------------------------------------------------------------------
# the quadratic relation of the divisor monodromies


def hecke_check(rep, mp, tol=1e-8, floor=1.5e-2):
    """Monodromy matrices of the half-turn divisor paths and their
    relations: (S_i - t_i)(S_i + t_i^{-1}) = 0 and the braid relations
    with the Coxeter exponents m_ij."""
    rs = rep.rs
    cvals = rep.require_numeric()
    z0 = choose_base_point(rs, mp)
    n = rs.rank
    S = []
    tvals = []
    terr = 0.0
    for i in range(n):
        k = rs.index(rs.simple[i])
        path = braid_arc(rs, mp, z0, i, multiplier=rep.refl_numeric(k), floor=floor)
        res = transport(matrix_sampler(rep, mp), path, tol)
        terr = max(terr, res.error)
        S.append(path.multiplier @ res.value)
        tvals.append(cmath.exp(-TWO_PI_I * complex(cvals[rep.orbit_of[k]])
                               / complex(rs.sq(rs.roots[k]))))
    quad = {}
    for i in range(n):
        t = tvals[i]
        I = np.eye(rep.nw, dtype=complex)
        Q = (S[i] - t * I) @ (S[i] + I / t)
        quad["S_%d" % i] = float(np.abs(Q).max())
    braid = {}
    for i in range(n):
        for j in range(i + 1, n):
            m = braid_order(rs, i, j)
            lhs = np.eye(rep.nw, dtype=complex)
            rhs = np.eye(rep.nw, dtype=complex)
            for a in range(m):
                lhs = lhs @ (S[i] if a % 2 == 0 else S[j])
                rhs = rhs @ (S[j] if a % 2 == 0 else S[i])
            braid["%d_%d" % (i, j)] = float(np.abs(lhs - rhs).max())
    return {
        "label": rs.label + str(rs.rank),
        "base": [repr(v) for v in z0],
        "t": [repr(t) for t in tvals],
        "quadratic": quad,
        "braid": braid,
        "max_quadratic": max(quad.values()),
        "max_braid": max(braid.values(), default=0.0),
        "transport_error": terr,
        "monodromy": S,
    }


# ---------------------------------------------------------------------------
# truncated enveloping algebra target


class EnvelopingTruncation:
    """PBW basis of the enveloping algebra of the truncated quotient,
    cut at the same total degree.  Basis monomials are weakly increasing
    generator tuples; products straighten recursively through the
    bracket tables, so left multiplication is exactly nilpotent above
    degree zero."""

    def __init__(self, qa):
        self.qa = qa
        self.N = qa.N
        gens = []
        for bid in qa.bidegrees:
            d = bid[0] + bid[1]
            for pos in range(qa.dims[bid]):
                gens.append((d, bid, pos))
        gens.sort()
        self.gens = gens
        self.gid = {(bid, pos): g for g, (_, bid, pos) in enumerate(gens)}
        self.gdeg = [g[0] for g in gens]
        monos = [()]
        frontier = [()]
        while frontier:
            nxt = []
            for m in frontier:
                lo = m[-1] if m else 0
                used = sum(self.gdeg[g] for g in m)
                for g in range(lo, len(gens)):
                    if used + self.gdeg[g] <= self.N:
                        mm = m + (g,)
                        nxt.append(mm)
            monos.extend(nxt)
            frontier = nxt
        monos.sort(key=lambda m: (sum(self.gdeg[g] for g in m), m))
        self.monos = monos
        self.mindex = {m: i for i, m in enumerate(monos)}
        self.mdeg = [sum(self.gdeg[g] for g in m) for m in monos]
        self.dim = len(monos)
        self._brackets = {}
        self._products = {}
        self._lmats = {}
        self._units = {
            bid: qa.basis_elements(bid) for bid in qa.bidegrees
        }

    # -- structure ---------------------------------------------------------

    def _bracket_gens(self, g1, g2):
        key = (g1, g2)
        got = self._brackets.get(key)
        if got is None:
            _, bid1, p1 = self.gens[g1]
            _, bid2, p2 = self.gens[g2]
            e = self.qa.bracket(self._units[bid1][p1], self._units[bid2][p2])
            got = []
            num = _conn.as_numeric(e)
            for bid, vec in num.coords.items():
                for pos, val in enumerate(vec):
                    if val != 0:
                        got.append((self.gid[(bid, pos)], complex(val)))
            self._brackets[key] = got
        return got

    def _gen_times_mono(self, g, mono):
        key = (g, mono)
        got = self._products.get(key)
        if got is not None:
            return got
        deg = self.gdeg[g] + sum(self.gdeg[h] for h in mono)
        if deg > self.N:
            out = {}
        elif not mono or g <= mono[0]:
            out = {(g,) + mono: 1.0 + 0.0j}
        else:
            h, rest = mono[0], mono[1:]
            out = {}
            for m2, c in self._gen_times_mono(g, rest).items():
                out[(h,) + m2] = out.get((h,) + m2, 0.0) + c
            for b, cb in self._bracket_gens(g, h):
                for m2, c in self._gen_times_mono(b, rest).items():
                    nv = out.get(m2, 0.0) + cb * c
                    if nv:
                        out[m2] = nv
                    elif m2 in out:
                        del out[m2]
        self._products[key] = out
        return out

    def _lmat(self, g):
        got = self._lmats.get(g)
        if got is None:
            got = np.zeros((self.dim, self.dim), dtype=complex)
            for j, mono in enumerate(self.monos):
                for m2, c in self._gen_times_mono(g, mono).items():
                    got[self.mindex[m2], j] = c
            self._lmats[g] = got
        return got

    # -- elements ----------------------------------------------------------

    def unit(self):
        u = np.zeros(self.dim, dtype=complex)
        u[self.mindex[()]] = 1.0
        return u

    def from_sample_element(self, ce):
        """Degree-one embedding of a quotient element."""
        u = np.zeros(self.dim, dtype=complex)
        for bid, vec in ce.coords.items():
            for pos, val in enumerate(vec):
                if val != 0:
                    u[self.mindex[(self.gid[(bid, pos)],)]] = complex(val)
        return u

    def left_matrix(self, ce):
        M = np.zeros((self.dim, self.dim), dtype=complex)
        for bid, vec in ce.coords.items():
            for pos, val in enumerate(vec):
                if val != 0:
                    M = M + complex(val) * self._lmat(self.gid[(bid, pos)])
        return M

    def mul(self, u, v):
        out = np.zeros(self.dim, dtype=complex)
        for i in np.nonzero(u)[0]:
            w = v
            for g in reversed(self.monos[i]):
                w = self._lmat(g) @ w
            out = out + u[i] * w
        return out

    def exp(self, u):
        """exp of an augmentation-ideal element."""
        out = self.unit()
        term = self.unit()
        for k in range(1, self.N + 1):
            term = self.mul(u, term) / k
            out = out + term
        return out

    def log(self, u):
        """log of a group-like transport (unit coefficient 1)."""
        nu = u.copy()
        nu[self.mindex[()]] -= 1.0
        out = np.zeros(self.dim, dtype=complex)
        power = nu
        for k in range(1, self.N + 1):
            out = out + ((-1.0) ** (k + 1) / k) * power
            power = self.mul(nu, power)
        return out

    def graded(self, u, d):
        out = np.zeros(self.dim, dtype=complex)
        for i in range(self.dim):
            if self.mdeg[i] == d:
                out[i] = u[i]
        return out


def quotient_sampler(env, rs, mp):
    """Left-multiplication matrices of the K_i components at z."""
    qa = env.qa

    def sampler(z):
        S = kzb_sample(qa, rs, z, mp, check_regular=False)
        return [env.left_matrix(S.K(i)) for i in range(qa.n)]

    return sampler


def leading_term_check(qa, rs, mp, tol=1e-8, floor=1.5e-2, t_radius=0.12):
    """Lowest graded terms of the transport logarithms against the
    predicted generators."""
    env = EnvelopingTruncation(qa)
    sampler = quotient_sampler(env, rs, mp)
    z0 = choose_base_point(rs, mp)
    report = {"label": rs.label + str(rs.rank), "N": qa.N, "x": {}, "y": {}, "t": {}}
    terr = 0.0

    def relerr(piece, target):
        top = float(np.abs(target).max())
        return float(np.abs(piece - target).max()) / top

    for i in range(qa.n):
        res = transport(sampler, x_loop(rs, mp, z0, i, floor=floor), tol,
                        state0=env.unit())
        terr = max(terr, res.error)
        lg = env.log(res.value)
        target = env.from_sample_element(_conn.as_numeric(qa.y(i)).scale(-1.0))
        report["x"]["%d" % i] = relerr(env.graded(lg, 1), target)

        res = transport(sampler, y_loop(rs, mp, z0, i, floor=floor), tol,
                        state0=env.unit())
        terr = max(terr, res.error)
        xi = env.from_sample_element(_conn.as_numeric(qa.x(i)))
        mu = env.mul(env.exp(TWO_PI_I * xi), res.value)
        lg = env.log(mu)
        target = TWO_PI_I * xi - mp.tau * env.from_sample_element(
            _conn.as_numeric(qa.y(i))
        )
        report["y"]["%d" % i] = relerr(env.graded(lg, 1), target)

    for k in range(qa.npos):
        path = None
        for s in (0.0, 0.18, -0.18, 0.33, -0.33, 0.45, -0.45):
            cand = t_loop(rs, mp, z0, k, radius=t_radius,
                          slide=s * (1 + 0.41j), floor=floor)
            try:
                validate_path(cand)
            except ValueError:
                continue
            path = cand
            break
        if path is None:
            raise ValueError("no divisor-clear circle found for root %d" % k)
        res = transport(sampler, path, tol, state0=env.unit())
        terr = max(terr, res.error)
        lg = env.log(res.value)
        target = env.from_sample_element(_conn.as_numeric(qa.t(k)).scale(TWO_PI_I))
        resid = max(
            relerr(env.graded(lg, 2), target),
            float(np.abs(env.graded(lg, 1)).max()) / (2 * math.pi),
        )
        report["t"]["%d" % k] = resid

    report["max_residual"] = max(
        max(report["x"].values()),
        max(report["y"].values()),
        max(report["t"].values()),
    )
    report["transport_error"] = terr
    return report
