"""The odd Jacobi theta function and the derived kernels k, g, phi.

Normalization: theta(z|tau) is odd, 1-periodic, vanishes exactly on the
lattice Z + tau Z, and theta'(0|tau) = 1.  It is evaluated through the
triple-product form

    theta(z) = e^{pi i z} prod_{s>0}(1 - q^s u) prod_{s>=0}(1 - q^s/u)
               / (2 pi i prod_{s>0}(1 - q^s)^2),      u = e^{2 pi i z},

after reducing z into the fundamental cell, with the quasi-periodicity
factors applied for the reduction.  All x-expansions are jets; the
kernel k(z,x) = theta(z+x)/(theta(z)theta(x)) - 1/x and its x-derivative
g(z,x) and the even series phi(x) are pole-free in x and are produced
directly as jets.

A ModularPoint fixes tau and caches the q-product truncation: M is
chosen with |q|^M below 1e-18.
"""

import cmath
import math
from fractions import Fraction

import numpy as np

from .jets import Jet, Jet2, div_diff1, div_diff2, powers, series_at

TWO_PI_I = 2j * math.pi


class ModularPoint:
    def __init__(self, tau, cutoff=1e-18):
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        self.tau = tau
        self.q = cmath.exp(TWO_PI_I * tau)
        qa = abs(self.q)
        self.M = max(4, int(math.ceil(math.log(cutoff) / math.log(qa))))
        # prod (1-q^s), shared by the normalization and by eta
        prod = 1.0 + 0j
        qs = 1.0 + 0j
        for _ in range(self.M):
            qs *= self.q
            prod *= 1.0 - qs
        self.q_prod = prod
        self._unit_cache = {}

    def eta(self):
        """Dedekind eta = q^{1/24} prod (1-q^n)."""
        return cmath.exp(TWO_PI_I * self.tau / 24.0) * self.q_prod

    def __repr__(self):
        return "ModularPoint(tau=%s)" % (self.tau,)


def _reduce(z, tau):
    """z = z0 + m + n tau with z0 in the fundamental cell; returns (z0, m, n)."""
    z = complex(z)
    n = int(round(z.imag / tau.imag))
    z0 = z - n * tau
    m = int(round(z0.real))
    z0 -= m
    return z0, m, n


def jet_theta(z, mp, order):
    """Jet in x of theta(z + x | tau) to the given order."""
    z0, m, n = _reduce(z, mp.tau)
    ex = Jet.exp_x(TWO_PI_I, order)          # e^{2 pi i x}
    exi = Jet.exp_x(-TWO_PI_I, order)        # e^{-2 pi i x}
    u = cmath.exp(TWO_PI_I * z0)
    acc = Jet.exp_x(1j * math.pi, order) * cmath.exp(1j * math.pi * z0)
    qs = 1.0 + 0j
    acc = acc * (1.0 - (exi * (1.0 / u)))
    for _ in range(mp.M):
        qs *= mp.q
        acc = acc * (1.0 - (ex * (qs * u)))
        acc = acc * (1.0 - (exi * (qs / u)))
    acc = acc * (1.0 / (TWO_PI_I * mp.q_prod * mp.q_prod))
    sign = -1.0 if (m + n) % 2 else 1.0
    if n == 0:
        return acc * sign
    mult = Jet.exp_x(-TWO_PI_I * n, order) * (
        sign * cmath.exp(-1j * math.pi * n * n * mp.tau - TWO_PI_I * n * z0)
    )
    return acc * mult


def theta(z, mp):
    """Scalar theta value; same product as jet_theta at order zero."""
    z0, m, n = _reduce(z, mp.tau)
    u = cmath.exp(TWO_PI_I * z0)
    acc = cmath.exp(1j * math.pi * z0) * (1.0 - 1.0 / u)
    qs = 1.0 + 0j
    for _ in range(mp.M):
        qs *= mp.q
        acc *= (1.0 - qs * u) * (1.0 - qs / u)
    acc /= TWO_PI_I * mp.q_prod * mp.q_prod
    if (m + n) % 2:
        acc = -acc
    if n:
        acc *= cmath.exp(-1j * math.pi * n * n * mp.tau - TWO_PI_I * n * z0)
    return acc


def theta_log_deriv(z, mp):
    """(theta'/theta)(z)."""
    j = jet_theta(z, mp, 1)
    return complex(j[1] / j[0])


def unit_jet(mp, order):
    """theta(x)/x as a jet; constant term 1."""
    if order not in mp._unit_cache:
        j = jet_theta(0.0, mp, order + 1)
        mp._unit_cache[order] = j.shift_down(1, check=1e-12)
    return mp._unit_cache[order]


def k_jet(z, mp, order):
    """k(z, x) = theta(z+x)/(theta(z) theta(x)) - 1/x as a jet in x.

    Coefficient 0 is (theta'/theta)(z)."""
    num = jet_theta(z, mp, order + 1)
    den = unit_jet(mp, order + 1) * num[0]
    frac = num / den
    return (frac - 1.0).shift_down(1, check=1e-8).truncate(order)


def g_jet(z, mp, order):
    """g(z, x) = d/dx k(z, x) as a jet in x."""
    return k_jet(z, mp, order + 1).deriv()


def k_scalar(z, x, mp):
    """k(z, x) at a numeric x away from 0."""
    return theta(z + x, mp) / (theta(z, mp) * theta(x, mp)) - 1.0 / x


def g_scalar(z, x, mp):
    """g(z, x) at a numeric x away from 0."""
    r = theta(z + x, mp) / (theta(z, mp) * theta(x, mp))
    return r * (theta_log_deriv(z + x, mp) - theta_log_deriv(x, mp)) + 1.0 / (x * x)


def phi_jet(mp, order):
    """phi(x) = (u'/u)'(0) - (u'/u)'(x) for u(x) = theta(x)/x, as a jet.

    Even series; phi(x) = sum_{n>=1} a_{2n} E_{2n+2}(tau) x^{2n}."""
    u = unit_jet(mp, order + 2)
    l = u.deriv() / u
    lp = l.deriv()
    c = -lp.c[: order + 1]
    c[0] = 0.0
    return Jet(c)


def bernoulli(r):
    """Exact Bernoulli number B_r (B_1 = -1/2 convention)."""
    if r < 0:
        raise ValueError("negative index")
    row = [Fraction(1)]
    for m in range(1, r + 1):
        acc = sum(math.comb(m + 1, j) * row[j] for j in range(m))
        row.append(-acc / Fraction(m + 1))
    return row[r]


def a_coeff(two_n):
    """a_{2n} = -(2n+1) B_{2n+2} (2 pi i)^{2n+2} / (2n+2)!  (real)."""
    n2 = two_n + 2
    b = bernoulli(n2)
    val = -Fraction(two_n + 1) * b / math.factorial(n2)
    sign = (-1) ** (n2 // 2)
    return float(val) * sign * (2.0 * math.pi) ** n2


def eisenstein(mp, weight):
    """E_weight(tau) extracted from phi: E_{2n+2} = phi_{2n} / a_{2n}."""
    if weight < 4 or weight % 2:
        raise ValueError("weight must be even and >= 4")
    two_n = weight - 2
    ph = phi_jet(mp, two_n)
    return complex(ph[two_n] / a_coeff(two_n))


def eisenstein_q_series(weight, q, terms=None):
    """Classical normalization E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if terms is None:
        terms = max(8, int(math.ceil(math.log(1e-18) / math.log(abs(q)))))
    k = weight
    coef = -2 * k / float(bernoulli(k))
    acc = 1.0 + 0j
    for n in range(1, terms + 1):
        sig = sum(d ** (k - 1) for d in range(1, n + 1) if n % d == 0)
        acc += coef * sig * q ** n
    return acc


def sample_z(rng, mp, margin=0.05):
    """A point a + b tau with a, b uniform in [margin, 1 - margin]."""
    a = rng.uniform(margin, 1.0 - margin)
    b = rng.uniform(margin, 1.0 - margin)
    return a + b * mp.tau


# ---------------------------------------------------------------------------
# identity suite


def _theta_periodicity(mp, zs):
    res = 0.0
    for z in zs:
        t = theta(z, mp)
        res = max(res, abs(theta(z + 1.0, mp) + t))
        res = max(res, abs(theta(-z, mp) + t))
        pred = -cmath.exp(-1j * math.pi * mp.tau - TWO_PI_I * z) * t
        res = max(res, abs(theta(z + mp.tau, mp) - pred))
    return res


def _theta_modularity(mp, zs):
    mp1 = ModularPoint(mp.tau + 1.0)
    mps = ModularPoint(-1.0 / mp.tau)
    res = 0.0
    for z in zs:
        t = theta(z, mp)
        res = max(res, abs(theta(z, mp1) - t))
        pred = -(1.0 / mp.tau) * cmath.exp(1j * math.pi * z * z / mp.tau) * t
        res = max(res, abs(theta(-z / mp.tau, mps) - pred))
    return res


def _theta_heat(mp, zs, h=1e-5):
    mpp = ModularPoint(mp.tau + h)
    mpm = ModularPoint(mp.tau - h)
    e3 = mp.eta() ** 3
    res = 0.0
    for z in zs:
        lhs = (mpp.eta() ** 3 * theta(z, mpp) - mpm.eta() ** 3 * theta(z, mpm)) / (
            2.0 * h
        )
        rhs = e3 * 2.0 * jet_theta(z, mp, 2)[2] / (4j * math.pi)
        res = max(res, abs(lhs - rhs))
    return res


def _k_quasi_periodicity(mp, zs, order):
    res = 0.0
    exi = Jet.exp_x(-TWO_PI_I, order + 1)
    for z in zs:
        k0 = k_jet(z, mp, order)
        k1 = k_jet(z + 1.0, mp, order)
        res = max(res, float(np.abs(k1.c - k0.c).max()))
        ktau = k_jet(z + mp.tau, mp, order)
        extra = (exi - 1.0).shift_down(1, check=1e-12)
        pred = exi.truncate(order) * k0 + extra.truncate(order)
        res = max(res, float(np.abs(ktau.c - pred.c).max()))
        # oddness k(z,x) = -k(-z,-x)
        km = k_jet(-z, mp, order)
        flip = km.c * [(-1.0) ** (m + 1) for m in range(order + 1)]
        res = max(res, float(np.abs(flip - k0.c).max()))
    return res


def _g_symmetry(mp, zs, order):
    res = 0.0
    for z in zs:
        gz = g_jet(z, mp, order)
        gm = g_jet(-z, mp, order)
        flip = gm.c * [(-1.0) ** m for m in range(order + 1)]
        res = max(res, float(np.abs(flip - gz.c).max()))
    return res


def _k_heat(mp, zs, order, h=1e-5):
    """d_tau k = (1/2 pi i) d_z g, both by central differences."""
    mpp = ModularPoint(mp.tau + h)
    mpm = ModularPoint(mp.tau - h)
    res = 0.0
    for z in zs:
        dtau = (k_jet(z, mpp, order).c - k_jet(z, mpm, order).c) / (2.0 * h)
        dzg = (g_jet(z + h, mp, order).c - g_jet(z - h, mp, order).c) / (2.0 * h)
        res = max(res, float(np.abs(dtau - dzg / TWO_PI_I).max()))
    return res


def _six_term(mp, pairs, order):
    """The theta addition identity in divided-difference form, as a jet
    identity in two variables u, v."""
    nu = nv = order
    u = Jet2.u_var(nu, nv)
    v = Jet2.v_var(nu, nv)
    deg = 2 * order + 2
    upow = powers(u, deg)
    vpow = powers(v, deg)
    mvpow = powers(-v, deg)
    uvpow = powers(u + v, deg)
    res = 0.0
    for z, zp in pairs:
        kz = k_jet(z, mp, deg).c
        kzp = k_jet(zp, mp, deg).c
        kd = k_jet(zp - z, mp, deg).c
        total = (
            series_at(kz, mvpow) * series_at(kzp, uvpow)
            - series_at(kz, upow) * series_at(kd, uvpow)
            + series_at(kzp, upow) * series_at(kd, vpow)
            - div_diff1(kd, uvpow, vpow)
            - div_diff1(kzp, uvpow, upow)
            - div_diff1(kz, upow, mvpow)
        )
        res = max(res, total.max_abs())
    return res


def _six_term_scalar(mp, pairs, rng):
    """The same identity at numeric u, v as an independent route."""
    res = 0.0
    for z, zp in pairs:
        u = rng.uniform(0.05, 0.2) + 1j * rng.uniform(0.01, 0.1)
        v = rng.uniform(0.05, 0.2) - 1j * rng.uniform(0.01, 0.1)
        total = (
            k_scalar(z, -v, mp) * k_scalar(zp, u + v, mp)
            - k_scalar(z, u, mp) * k_scalar(zp - z, u + v, mp)
            + k_scalar(zp, u, mp) * k_scalar(zp - z, v, mp)
            + (k_scalar(zp - z, v, mp) - k_scalar(zp - z, u + v, mp)) / u
            + (k_scalar(zp, u, mp) - k_scalar(zp, u + v, mp)) / v
            + (k_scalar(z, -v, mp) - k_scalar(z, u, mp)) / (u + v)
        )
        res = max(res, abs(total))
    return res


def _l_identity(mp, zs, order):
    """The combination L(z,u,v) built from phi, k, g vanishes identically."""
    nu = nv = order
    u = Jet2.u_var(nu, nv)
    v = Jet2.v_var(nu, nv)
    deg = 2 * order + 2
    upow = powers(u, deg)
    vpow = powers(v, deg)
    mvpow = powers(-v, deg)
    uvpow = powers(u + v, deg)
    ph = phi_jet(mp, deg).c
    res = 0.0
    for z in zs:
        kz = k_jet(z, mp, deg).c
        gz = g_jet(z, mp, deg).c
        phi_u = series_at(ph, upow)
        phi_v = series_at(ph, vpow)
        # (phi(u)-phi(v))/(u+v): phi even, so pair u with -v
        dd_phi = div_diff1(ph, upow, mvpow)
        total = (
            0.5 * dd_phi
            + 0.5 * series_at(kz, uvpow) * (phi_u - phi_v)
            + 0.5
            * (
                series_at(gz, upow) * series_at(kz, vpow)
                - series_at(kz, upow) * series_at(gz, vpow)
            )
            - 0.5 * (div_diff2(kz, uvpow, upow) - div_diff2(kz, uvpow, vpow))
        )
        res = max(res, total.max_abs())
    return res


def _h_identity(mp, pairs, order):
    """The second moduli combination H(z,z',u,v) vanishes identically."""
    nu = nv = order
    u = Jet2.u_var(nu, nv)
    v = Jet2.v_var(nu, nv)
    deg = 2 * order + 2
    upow = powers(u, deg)
    vpow = powers(v, deg)
    mupow = powers(-u, deg)
    mvpow = powers(-v, deg)
    uvpow = powers(u + v, deg)
    res = 0.0
    for z, zp in pairs:
        kz = k_jet(z, mp, deg).c
        kzp = k_jet(zp, mp, deg).c
        gz = g_jet(z, mp, deg).c
        gzp = g_jet(zp, mp, deg).c
        gd = g_jet(zp - z, mp, deg).c
        gdm = g_jet(z - zp, mp, deg).c
        sign = np.array([(-1.0) ** m for m in range(deg + 1)])
        kzm = kz * sign * (-1.0)     # k(-z, x) = -k(z, -x) -> coefficients
        kzpm = kzp * sign * (-1.0)
        total = (
            div_diff2(kz, uvpow, upow)
            - div_diff2(kzp, uvpow, vpow)
            + div_diff1(gd, mupow, vpow) * (-1.0)
            - series_at(gzp * sign, mvpow) * series_at(kzm, mupow)
            + series_at(gz * sign, mupow) * series_at(kzpm, mvpow)
            - series_at(gdm, mvpow) * series_at(kz, uvpow)
            + series_at(gd, mupow) * series_at(kzp, uvpow)
        )
        res = max(res, total.max_abs())
    return res


def _phi_eisenstein(mp, order):
    """phi is even and its normalized coefficients match the classical
    Eisenstein q-series."""
    deg = max(2 * order, 6)
    ph = phi_jet(mp, deg)
    res = 0.0
    for m in range(1, deg + 1, 2):
        res = max(res, abs(ph[m]))
    for two_n in (2, 4):
        e_phi = ph[two_n] / a_coeff(two_n)
        e_q = eisenstein_q_series(two_n + 2, mp.q)
        res = max(res, abs(e_phi - e_q))
    return res


def _trig_limit(order):
    """At large Im tau, theta degenerates to its trigonometric form."""
    mp = ModularPoint(0.1 + 30j)
    res = 0.0
    for z in (0.17, 0.45 - 0.2j, -0.33 + 0.1j):
        pred = (cmath.exp(1j * math.pi * z) - cmath.exp(-1j * math.pi * z)) / TWO_PI_I
        res = max(res, abs(theta(z, mp) - pred))
    return res


def identity_suite(mp, samples=10, order=4, seed=0):
    """Run the theta/k/g/phi identity checks at `samples` random points.

    Returns a dict mapping check names to maximal absolute residuals.
    FD-based checks (heat equations) are listed separately from the
    algebraic ones since their accuracy is limited by the step size.
    """
    import random

    rng = random.Random(seed)
    zs = [sample_z(rng, mp) for _ in range(samples)]
    pairs = []
    for _ in range(samples):
        z = sample_z(rng, mp)
        zp = sample_z(rng, mp)
        if abs(theta(zp - z, mp)) < 1e-3:
            zp = zp + 0.21
        pairs.append((z, zp))
    out = {
        "theta_deriv_at_zero": abs(jet_theta(0.0, mp, 1)[1] - 1.0),
        "theta_periodicity": _theta_periodicity(mp, zs),
        "theta_modularity": _theta_modularity(mp, zs),
        "theta_heat_fd": _theta_heat(mp, zs),
        "k_quasi_periodicity": _k_quasi_periodicity(mp, zs, order),
        "g_parity": _g_symmetry(mp, zs, order),
        "k_heat_fd": _k_heat(mp, zs, order),
        "six_term_jets": _six_term(mp, pairs, order),
        "six_term_scalar": _six_term_scalar(mp, pairs, rng),
        "l_vanishing": _l_identity(mp, zs, order),
        "h_vanishing": _h_identity(mp, pairs, order),
        "phi_eisenstein": _phi_eisenstein(mp, order),
        "theta_trig_limit": _trig_limit(order),
    }
    return out
