"""The universal elliptic KZB connection, evaluated in the truncated algebra.

Torus points are stored in coweight coordinates, z = sum_i z_i lambda_i_vee,
so lattice translations are integer (and tau-integer) coordinate shifts.  At
fixed tau the connection is d - sum_i K_i dz_i with

    K_i = sum_{alpha > 0} alpha(lambda_i_vee) *
            k(alpha(z), ad(x_{alpha_vee}/2) | tau)(t_alpha)  -  y_i,

and a sample records A_i = -K_i.  The moduli extension subtracts Delta dtau,
where Delta combines the derivations Delta_0 and delta_{2m} with a t-valued
elliptic part.

Elements here are numeric: dense complex vectors over the quotient basis per
bidegree, with brackets going through floated structure tables.  Exact
rational data (ad-chains, Weyl and derivation matrices) is computed once in
the quotient and cached on the algebra.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .elliptic import (
    ModularPoint,
    a_coeff,
    bernoulli,
    eisenstein,
    g_jet,
    k_jet,
    theta,
)
from .rootsys import inversion_set, omega, weyl_group

TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------------
# numeric elements over the quotient basis


class CElement:
    """A complex-coefficient element of the truncated quotient algebra.

    coords maps a bidegree to a dense complex vector over the quotient
    basis of that piece.  Missing bidegrees are zero."""

    __slots__ = ("qa", "coords")

    def __init__(self, qa, coords=None):
        self.qa = qa
        self.coords = coords if coords is not None else {}

    def copy(self):
        return CElement(self.qa, {b: v.copy() for b, v in self.coords.items()})

    def __add__(self, other):
        out = {b: v.copy() for b, v in self.coords.items()}
        for b, v in other.coords.items():
            if b in out:
                out[b] = out[b] + v
            else:
                out[b] = v.copy()
        return CElement(self.qa, out)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, c):
        return CElement(self.qa, {b: v * c for b, v in self.coords.items()})

    def is_zero(self):
        return not self.coords

    def norm(self):
        """Largest absolute coordinate."""
        best = 0.0
        for v in self.coords.values():
            m = float(np.abs(v).max()) if len(v) else 0.0
            if m > best:
                best = m
        return best

    def component(self, bid):
        v = self.coords.get(bid)
        if v is None:
            return np.zeros(self.qa.dims.get(bid, 0), dtype=complex)
        return v

    def __repr__(self):
        return "CElement(%s)" % ", ".join(
            "%s:%.3g" % (b, float(np.abs(v).max())) for b, v in sorted(self.coords.items())
        )


def czero(qa):
    return CElement(qa)


def as_numeric(e):
    """Dense complex mirror of an exact LieElement."""
    qa = e.qa
    coords = {}
    for bid, vec in e.coords.items():
        arr = np.zeros(qa.dims[bid], dtype=complex)
        pos = qa._qpos[bid]
        for col, val in vec.items():
            arr[pos[col]] = complex(val)
        coords[bid] = arr
    return CElement(qa, coords)


def _num_cache(qa):
    cache = getattr(qa, "_numeric_cache", None)
    if cache is None:
        cache = {}
        qa._numeric_cache = cache
    return cache


def _float_table(qa, bid1, bid2):
    """Structure constants of [bid1, bid2] as flat index/value arrays."""
    cache = _num_cache(qa)
    key = ("tab", bid1, bid2)
    got = cache.get(key)
    if got is None:
        i1s, i2s, ps, vs = [], [], [], []
        for (i1, i2), ent in qa._table(bid1, bid2).items():
            for p, val in ent.items():
                i1s.append(i1)
                i2s.append(i2)
                ps.append(p)
                vs.append(float(val))
        got = (
            np.asarray(i1s, dtype=np.intp),
            np.asarray(i2s, dtype=np.intp),
            np.asarray(ps, dtype=np.intp),
            np.asarray(vs, dtype=float),
        )
        cache[key] = got
    return got


def cbracket(e1, e2):
    qa = e1.qa
    out = {}
    for bid1, v1 in e1.coords.items():
        for bid2, v2 in e2.coords.items():
            tgt = (bid1[0] + bid2[0], bid1[1] + bid2[1])
            if tgt[0] + tgt[1] > qa.N or tgt not in qa.basis:
                continue
            i1, i2, p, val = _float_table(qa, bid1, bid2)
            if not len(p):
                continue
            contrib = val * v1[i1] * v2[i2]
            tv = out.get(tgt)
            if tv is None:
                tv = out[tgt] = np.zeros(qa.dims[tgt], dtype=complex)
            np.add.at(tv, p, contrib)
    return CElement(qa, out)


def exp_ad(xe, coeff, e):
    """exp(coeff * ad xe)(e); the series stops at the truncation degree."""
    out = e
    cur = e
    k = 0
    while True:
        k += 1
        cur = cbracket(xe, cur).scale(coeff / k)
        if cur.is_zero():
            return out
        out = out + cur


# ---------------------------------------------------------------------------
# cached exact data: ad-chains, root pairings, Weyl and derivation matrices


def _chains(qa):
    """chains[k][m] = (ad x_{alpha_k_vee}/2)^m (t_k), numeric, m <= N-2."""
    cache = _num_cache(qa)
    got = cache.get("chains")
    if got is None:
        rs = qa.rs
        half = Fraction(1, 2)
        got = []
        for k in range(qa.npos):
            xe = qa.x_of(rs.coweight_coords(rs.coroot(k)))
            cur = qa.t(k)
            vecs = []
            for _ in range(qa.N - 1):
                vecs.append(as_numeric(cur))
                cur = qa.bracket(xe, cur).scale(half)
            got.append(vecs)
        cache["chains"] = got
    return got


def _root_floats(qa):
    """Integer coefficients of each positive root on the coweight basis."""
    cache = _num_cache(qa)
    got = cache.get("roots")
    if got is None:
        got = [tuple(float(c) for c in m) for m in qa._root_coeffs]
        cache["roots"] = got
    return got


def root_values(qa, z):
    """alpha(z) for all positive roots, z in coweight coordinates."""
    return [sum(c * zc for c, zc in zip(m, z) if c) for m in _root_floats(qa)]


def _weyl_float(qa, w, bid):
    cache = _num_cache(qa)
    key = ("wmat", w.perm, bid)
    got = cache.get(key)
    if got is None:
        d = qa.dims[bid]
        M = np.zeros((d, d))
        for j, col in enumerate(qa.weyl_matrix(w, bid)):
            for row, val in col.items():
                M[row, j] = float(val)
        got = cache[key] = M
    return got


def weyl_apply(qa, w, e):
    return CElement(
        qa, {bid: _weyl_float(qa, w, bid) @ v for bid, v in e.coords.items()}
    )


def _deriv_matrix(qa, name, bid):
    """Dense matrix of a derivation on one quotient piece, or None if the
    image leaves the truncation."""
    cache = _num_cache(qa)
    key = ("dmat", name, bid)
    if key in cache:
        return cache[key]
    dp, dq = qa.derivation_shift(name)
    tgt = (bid[0] + dp, bid[1] + dq)
    got = None
    if tgt[0] >= 0 and tgt[0] + tgt[1] <= qa.N and qa.dims.get(tgt):
        M = np.zeros((qa.dims[tgt], qa.dims[bid]), dtype=complex)
        pos = qa._qpos[tgt]
        for j, unit in enumerate(qa.basis_elements(bid)):
            im = qa.derivation(name, unit, truncate=True)
            vec = im.coords.get(tgt)
            if vec:
                for col, val in vec.items():
                    M[pos[col], j] = complex(val)
        if np.abs(M).max() > 0:
            got = (tgt, M)
    cache[key] = got
    return got


def apply_derivation(qa, name, e):
    out = {}
    for bid, v in e.coords.items():
        got = _deriv_matrix(qa, name, bid)
        if got is None:
            continue
        tgt, M = got
        img = M @ v
        if tgt in out:
            out[tgt] = out[tgt] + img
        else:
            out[tgt] = img
    return CElement(qa, out)


# ---------------------------------------------------------------------------
# points on the torus


def divisor_distance(rs, z, mp):
    """min over positive roots of |theta(alpha(z) | tau)|."""
    best = math.inf
    for k in range(rs.num_positive()):
        s = sum(float(c) * zc for c, zc in zip(rs.simple_coords(k), z))
        v = abs(theta(s, mp))
        if v < best:
            best = v
    return best


def _require_regular(rs, z, mp, floor):
    d = divisor_distance(rs, z, mp)
    if d <= floor:
        raise ValueError(
            "divisor proximity: min |theta(alpha(z))| = %.3g <= %.3g" % (d, floor)
        )


def sample_torus_point(rng, rs, mp, floor=1e-3, margin=0.1, max_draws=50000):
    """Draw z uniform in the fundamental cell of the coweight lattice,
    rejecting points within `floor` of a root divisor and points where some
    |Im alpha(z)| exceeds Im tau - margin."""
    n = rs.rank
    imt = mp.tau.imag
    coeffs = [
        tuple(float(c) for c in rs.simple_coords(k)) for k in range(rs.num_positive())
    ]
    for _ in range(max_draws):
        z = tuple(rng.random() + rng.random() * mp.tau for _ in range(n))
        ok = True
        for m in coeffs:
            s = sum(c * zc for c, zc in zip(m, z) if c)
            if abs(s.imag) > imt - margin or abs(theta(s, mp)) <= floor:
                ok = False
                break
        if ok:
            return z
    raise RuntimeError("no regular point found in %d draws" % max_draws)


# ---------------------------------------------------------------------------
# the connection at fixed tau


@dataclass
class ConnectionSample:
    z: tuple
    tau: complex
    A: list  # CElement per coweight direction; the 1-form is d - sum (-A_i) dz_i

    def K(self, i):
        return self.A[i].scale(-1.0)


def kzb_sample(qa, rs, z, mp, floor=1e-3, check_regular=True, negate_system=False):
    """Evaluate the connection components at z.

    A_i = y_i - sum_{alpha>0} alpha(lambda_i_vee) sum_m k_m(alpha(z)|tau)
    (ad x_{alpha_vee}/2)^m (t_alpha).  With negate_system the sum runs over
    the opposite system -Phi+ instead; the result must not change."""
    z = tuple(complex(c) for c in z)
    if check_regular:
        _require_regular(rs, z, mp, floor)
    chains = _chains(qa)
    n = qa.n
    sign = -1.0 if negate_system else 1.0
    A = [as_numeric(qa.y(i)) for i in range(n)]
    for k, s in enumerate(root_values(qa, z)):
        kj = k_jet(sign * s, mp, qa.N - 2)
        m_i = qa._root_coeffs[k]
        for m in range(qa.N - 1):
            km = kj[m] * sign ** (m + 1)
            if km == 0:
                continue
            ch = chains[k][m]
            for i in range(n):
                if m_i[i]:
                    A[i] = A[i] + ch.scale(-m_i[i] * km)
    return ConnectionSample(z, mp.tau, A)


@dataclass
class CurvatureReport:
    max_residual: float
    pairs: dict  # (i, j) or ("tau", i) -> max abs coordinate of that 2-form part
    by_bidegree: dict
    meta: dict


def _bid_max(by_bid, e):
    for bid, v in e.coords.items():
        m = float(np.abs(v).max()) if len(v) else 0.0
        if m > by_bid.get(bid, 0.0):
            by_bid[bid] = m


def curvature_fixed_tau(qa, rs, z, mp, floor=1e-3):
    """max over i < j of ||[A_i, A_j]|| in quotient coordinates.  At fixed
    tau each alpha-term depends only on alpha(z) and pairs with d(alpha(z)),
    so the exterior-derivative part vanishes identically."""
    S = kzb_sample(qa, rs, z, mp, floor=floor)
    pairs = {}
    by_bid = {}
    for i in range(qa.n):
        for j in range(i + 1, qa.n):
            c = cbracket(S.A[i], S.A[j])
            pairs[(i, j)] = c.norm()
            _bid_max(by_bid, c)
    worst = max(pairs.values(), default=0.0)
    return CurvatureReport(
        worst, pairs, by_bid, {"z": S.z, "tau": mp.tau, "label": rs.label + str(rs.rank), "N": qa.N}
    )


def quasi_periodicity_check(qa, rs, z, mp, floor=1e-3):
    """Translation behavior of K_i = -A_i over the two lattice directions.

    K_i(z + lambda_j_vee) = K_i(z), and K_i(z + tau lambda_j_vee) =
    exp(-2 pi i ad x(lambda_j_vee)) K_i(z)."""
    S = kzb_sample(qa, rs, z, mp, floor=floor)
    lat = 0.0
    tau_lat = 0.0
    for j in range(qa.n):
        z1 = tuple(c + (1.0 if i == j else 0.0) for i, c in enumerate(S.z))
        z2 = tuple(c + (mp.tau if i == j else 0.0) for i, c in enumerate(S.z))
        S1 = kzb_sample(qa, rs, z1, mp, check_regular=False)
        S2 = kzb_sample(qa, rs, z2, mp, check_regular=False)
        xj = as_numeric(qa.x(j))
        for i in range(qa.n):
            lat = max(lat, (S1.A[i] - S.A[i]).norm())
            conj = exp_ad(xj, -TWO_PI_I, S.K(i))
            tau_lat = max(tau_lat, (S2.K(i) - conj).norm())
    return {"lattice": lat, "tau_lattice": tau_lat}


# ---------------------------------------------------------------------------
# the moduli direction


@dataclass
class DeltaSample:
    z: tuple
    tau: complex
    dcoeffs: dict  # derivation name -> complex coefficient
    element: CElement  # 1/(2 pi i) sum_beta g(beta(z), ad x_{beta_vee}/2)(t_beta)


def _delta_element(qa, z, mp):
    el = czero(qa)
    chains = _chains(qa)
    for k, s in enumerate(root_values(qa, z)):
        gj = g_jet(s, mp, qa.N - 2)
        for m in range(qa.N - 1):
            c = gj[m] / TWO_PI_I
            if c != 0:
                el = el + chains[k][m].scale(c)
    return el


def delta_sample(qa, rs, z, mp, floor=1e-3, check_regular=True):
    """The dtau-component Delta of the moduli connection.

    Delta = -Delta_0/(2 pi i) - sum_n a_{2n} E_{2n+2}(tau) delta_{2n}/(2 pi i)
            + (1/2 pi i) sum_beta g(beta(z), ad x_{beta_vee}/2 | tau)(t_beta),
    keeping delta_{2n} while 2n+2 stays within the truncation."""
    z = tuple(complex(c) for c in z)
    if check_regular:
        _require_regular(rs, z, mp, floor)
    dco = {"Delta0": -1.0 / TWO_PI_I}
    for two_n in range(2, qa.N - 1, 2):
        dco["delta%d" % two_n] = (
            -a_coeff(two_n) * eisenstein(mp, two_n + 2) / TWO_PI_I
        )
    return DeltaSample(z, mp.tau, dco, _delta_element(qa, z, mp))


def delta_bracket(qa, ds, e):
    """[Delta, e]: derivations act, the elliptic part brackets."""
    out = czero(qa)
    for name, c in ds.dcoeffs.items():
        im = apply_derivation(qa, name, e)
        if not im.is_zero():
            out = out + im.scale(c)
    return out + cbracket(ds.element, e)


def _richardson(f, h):
    """Central difference with one Richardson step: (4 D(h/2) - D(h)) / 3."""
    d1 = (f(h) - f(-h)).scale(1.0 / (2.0 * h))
    d2 = (f(h / 2) - f(-h / 2)).scale(1.0 / h)
    return d2.scale(4.0 / 3.0) - d1.scale(1.0 / 3.0)


def _jet_richardson(f, h):
    d1 = (f(h) - f(-h)) * (1.0 / (2.0 * h))
    d2 = (f(h / 2) - f(-h / 2)) * (1.0 / h)
    return d2 * (4.0 / 3.0) - d1 * (1.0 / 3.0)


def _dA_residual(qa, z, mp, mp_of, step):
    """Coefficient check behind dA = 0 on the moduli space: for every
    positive root and chain order, d/dtau k_m = d/dz g_m / (2 pi i)."""
    worst = 0.0
    order = qa.N - 2
    for s in root_values(qa, z):
        dk = _jet_richardson(lambda h: k_jet(s, mp_of[h], order), step)
        dg = _jet_richardson(lambda h: g_jet(s + h, mp, order), step)
        for m in range(order + 1):
            worst = max(worst, abs(dk[m] - dg[m] / TWO_PI_I))
    return worst


def curvature_moduli(qa, rs, z, mp, floor=1e-3, step=1e-5):
    """Curvature of d - sum_i K_i dz_i - Delta dtau.

    The mixed components are F_{tau,i} = d/dtau K_i - d/dz_i Delta -
    [Delta, K_i], with both derivatives by central differences plus one
    Richardson step; the z-z components are the fixed-tau brackets."""
    z = tuple(complex(c) for c in z)
    _require_regular(rs, z, mp, floor)
    tau = mp.tau
    mp_p = ModularPoint(tau + step)
    mp_m = ModularPoint(tau - step)
    mp_p2 = ModularPoint(tau + step / 2)
    mp_m2 = ModularPoint(tau - step / 2)
    mp_of = {step: mp_p, -step: mp_m, step / 2: mp_p2, -step / 2: mp_m2}

    S = kzb_sample(qa, rs, z, mp, floor=floor)
    D = delta_sample(qa, rs, z, mp, check_regular=False)

    pairs = {}
    by_bid = {}
    for i in range(qa.n):
        for j in range(i + 1, qa.n):
            c = cbracket(S.A[i], S.A[j])
            pairs[(i, j)] = c.norm()
            _bid_max(by_bid, c)

    samples_tau = {
        h: kzb_sample(qa, rs, z, m, check_regular=False) for h, m in mp_of.items()
    }
    for i in range(qa.n):
        dK = _richardson(lambda h: samples_tau[h].K(i), step)
        ei = tuple(1.0 if a == i else 0.0 for a in range(qa.n))

        def shifted(h):
            zz = tuple(c + h * e for c, e in zip(z, ei))
            return _delta_element(qa, zz, mp)

        dDelta = _richardson(shifted, step)
        F = dK - dDelta - delta_bracket(qa, D, S.K(i))
        pairs[("tau", i)] = F.norm()
        _bid_max(by_bid, F)

    meta = {
        "z": z,
        "tau": tau,
        "label": rs.label + str(rs.rank),
        "N": qa.N,
        "step": step,
        "dA_residual": _dA_residual(qa, z, mp, mp_of, step),
    }
    return CurvatureReport(max(pairs.values(), default=0.0), pairs, by_bid, meta)


# ---------------------------------------------------------------------------
# trigonometric degeneration


def _bseries_coeff(two_k):
    """Coefficient of w^(2k-1) in 2 pi i e^(2 pi i w)/(e^(2 pi i w)-1) - 1/w,
    namely B_{2k} (2 pi i)^{2k} / (2k)!."""
    b = bernoulli(two_k)
    return float(b) / math.factorial(two_k) * (-1) ** (two_k // 2) * (
        2.0 * math.pi
    ) ** two_k


def trig_x_image(qa, rs, u):
    """Degeneration image of the trigonometric generator X(u), u in coweight
    coordinates:

        (1/2 pi i) (-y(u) + sum_{alpha>0} alpha(u) [pi i t_alpha
                    + sum_k b_{2k} (ad x_{alpha_vee}/2)^{2k-1} t_alpha]).

    The overall 1/(2 pi i) restores the normalization in which the
    connection pairs X with dlog coordinates of unit residue; that is the
    normalization whose exchange relation [t_alpha, X_w(u)] = 0 carries
    the integer corrections sum beta(u) t_beta.  The order-0 part is then
    (1/2) sum alpha(u) t_alpha, the familiar shift between X and the
    divisor-symmetric generator."""
    e = as_numeric(qa.y_of(u)).scale(-1.0 / TWO_PI_I)
    chains = _chains(qa)
    for k in range(qa.npos):
        au = sum(c * float(uc) for c, uc in zip(_root_floats(qa)[k], u))
        if au == 0:
            continue
        e = e + chains[k][0].scale(au * 0.5)
        for two_k in range(2, qa.N, 2):
            if two_k - 1 > qa.N - 2:
                break
            e = e + chains[k][two_k - 1].scale(au * _bseries_coeff(two_k) / TWO_PI_I)
    return e


def trig_relation_residuals(qa, rs):
    """Residuals of the trigonometric relations (tt), (XX), (tX) on the
    degeneration images t_alpha -> t_alpha, X(u) -> trig_x_image(u)."""
    from .rootsys import rank2_subsystems

    tt = 0.0
    for psi in rank2_subsystems(rs):
        for a in psi.positive:
            acc = czero(qa)
            ta = as_numeric(qa.t(a))
            for b in psi.positive:
                if b != a:
                    acc = acc + cbracket(ta, as_numeric(qa.t(b)))
            tt = max(tt, acc.norm())

    n = qa.n
    ximg = [
        trig_x_image(qa, rs, tuple(1 if a == i else 0 for a in range(n)))
        for i in range(n)
    ]
    xx = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            xx = max(xx, cbracket(ximg[i], ximg[j]).norm())

    simple_idx = [rs.roots.index(rs.simple[i]) for i in range(n)]
    tx = 0.0
    checked = 0
    for w in weyl_group(rs):
        inv = inversion_set(rs, w)
        for i in range(n):
            a = w.perm[simple_idx[i]]
            if a >= qa.npos:
                continue
            ta = as_numeric(qa.t(a))
            for u in qa._kernel_basis(a):
                xw = czero(qa)
                for i2, c in enumerate(u):
                    if c:
                        xw = xw + ximg[i2].scale(float(c))
                for b in inv:
                    bu = sum(c * float(uc) for c, uc in zip(_root_floats(qa)[b], u))
                    if bu:
                        xw = xw - as_numeric(qa.t(b)).scale(bu)
                tx = max(tx, cbracket(ta, xw).norm())
                checked += 1
    return {"tt": tt, "XX": xx, "tX": tx, "tX_pairs": checked}


def trig_degeneration_check(qa, rs, z=None, im_tau=30.0, re_tau=0.1, seed=7):
    """Compare the connection at large Im tau with its closed-form limit.

    The m = 0 coefficient degenerates to 2 pi i/(e^{2 pi i alpha(z)} - 1) +
    pi i, odd chain orders to the constants b_{2k}, and even orders > 0 to
    zero; the X-images must then satisfy the trigonometric relations."""
    mp = ModularPoint(complex(re_tau, im_tau))
    if z is None:
        import random

        rng = random.Random(seed)
        z = tuple(
            rng.uniform(0.08, 0.92) + 1j * rng.uniform(0.05, 0.45)
            for _ in range(qa.n)
        )
    z = tuple(complex(c) for c in z)
    S = kzb_sample(qa, rs, z, mp)
    chains = _chains(qa)
    vals = root_values(qa, z)
    comp = 0.0
    for i in range(qa.n):
        acc = as_numeric(qa.y(i))
        for k, s in enumerate(vals):
            mi = qa._root_coeffs[k][i]
            if not mi:
                continue
            c0 = TWO_PI_I / (cmath.exp(TWO_PI_I * s) - 1.0) + 1j * math.pi
            acc = acc + chains[k][0].scale(-mi * c0)
            for two_k in range(2, qa.N, 2):
                if two_k - 1 > qa.N - 2:
                    break
                acc = acc + chains[k][two_k - 1].scale(-mi * _bseries_coeff(two_k))
        comp = max(comp, (S.A[i] - acc).norm())
    out = {"componentwise": comp, "im_tau": im_tau, "z": z, "tau": mp.tau}
    out.update(trig_relation_residuals(qa, rs))
    return out


# ---------------------------------------------------------------------------
# symmetry and exchange properties


def equivariance_check(qa, rs, z, mp, floor=1e-3):
    """For every simple reflection s, acting on the algebra and on the point
    together fixes the connection: s(K(z; u)) = K(sz; su)."""
    S = kzb_sample(qa, rs, z, mp, floor=floor)
    worst = 0.0
    n = qa.n
    for w in weyl_group(rs):
        if len(w.word) != 1:
            continue
        cw = [rs.coweight_coords(w.apply(lam)) for lam in rs.coweights]
        wz = tuple(
            sum(float(cw[j][i]) * S.z[j] for j in range(n)) for i in range(n)
        )
        Sw = kzb_sample(qa, rs, wz, mp, check_regular=False)
        for j in range(n):
            lhs = weyl_apply(qa, w, S.K(j))
            rhs = czero(qa)
            for i in range(n):
                c = float(cw[j][i])
                if c:
                    rhs = rhs + Sw.K(i).scale(c)
            worst = max(worst, (lhs - rhs).norm())
    return worst


def positive_system_check(qa, rs, z, mp, floor=1e-3):
    """Rebuilding the alpha-sum over -Phi+ must reproduce every component."""
    S = kzb_sample(qa, rs, z, mp, floor=floor)
    S2 = kzb_sample(qa, rs, z, mp, check_regular=False, negate_system=True)
    return max((S.A[i] - S2.A[i]).norm() for i in range(qa.n))


def omega_exchange_check(qa, rs, z, mp, floor=1e-3):
    """Bracket-exchange identity for the k-chains of two distinct positive
    roots: [k(alpha, ad x_{alpha_vee}/2)(t_alpha), k(beta, ..)(t_beta)] =
    k(alpha, ad x_{omega(alpha_vee,beta)}/-2) k(beta, ad
    x_{omega(beta_vee,alpha)}/-2) [t_alpha, t_beta]."""
    z = tuple(complex(c) for c in z)
    _require_regular(rs, z, mp, floor)
    chains = _chains(qa)
    vals = root_values(qa, z)
    jets = [k_jet(s, mp, qa.N - 2) for s in vals]
    kch = []
    for k in range(qa.npos):
        acc = czero(qa)
        for m in range(qa.N - 1):
            acc = acc + chains[k][m].scale(jets[k][m])
        kch.append(acc)
    worst = 0.0
    for a in range(qa.npos):
        for b in range(a + 1, qa.npos):
            lhs = cbracket(kch[a], kch[b])
            x1 = as_numeric(qa.x_of(rs.coweight_coords(omega(rs, a, b))))
            x2 = as_numeric(qa.x_of(rs.coweight_coords(omega(rs, b, a))))
            tb = cbracket(as_numeric(qa.t(a)), as_numeric(qa.t(b)))
            rhs = czero(qa)
            bl = tb
            l = 0
            while not bl.is_zero():
                cm = bl
                m = 0
                while not cm.is_zero():
                    rhs = rhs + cm.scale(jets[a][m] * jets[b][l])
                    cm = cbracket(x1, cm).scale(-0.5)
                    m += 1
                    if m > qa.N:
                        break
                bl = cbracket(x2, bl).scale(-0.5)
                l += 1
                if l > qa.N:
                    break
            worst = max(worst, (lhs - rhs).norm())
    return worst


# ---------------------------------------------------------------------------
# sample scans


def flatness_scan(
    qa,
    rs,
    mp,
    samples=20,
    seed=0,
    floor=1e-3,
    moduli=False,
    threads=1,
):
    """Curvature reports at `samples` random regular points.  Points are
    drawn from one seeded stream, so results do not depend on threading."""
    import random

    rng = random.Random(seed)
    points = [sample_torus_point(rng, rs, mp, floor=floor) for _ in range(samples)]
    fn = curvature_moduli if moduli else curvature_fixed_tau
    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(lambda p: fn(qa, rs, p, mp, floor=floor), points))
    return [fn(qa, rs, p, mp, floor=floor) for p in points]
