"""Truncated power series (jets) with complex coefficients.

Jet is univariate, Jet2 bivariate.  Arithmetic truncates to the shorter
operand, so order bookkeeping stays implicit.
"""

import numpy as np


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=complex)

    @classmethod
    def constant(cls, val, order):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = val
        return cls(c)

    @classmethod
    def variable(cls, order, scale=1.0):
        c = np.zeros(order + 1, dtype=complex)
        if order >= 1:
            c[1] = scale
        return cls(c)

    @classmethod
    def exp_x(cls, a, order):
        """exp(a x) as a jet."""
        c = np.empty(order + 1, dtype=complex)
        c[0] = 1.0
        for m in range(1, order + 1):
            c[m] = c[m - 1] * a / m
        return cls(c)

    @property
    def order(self):
        return len(self.c) - 1

    def __len__(self):
        return len(self.c)

    def __getitem__(self, m):
        return self.c[m]

    def _n(self, other):
        return min(len(self.c), len(other.c))

    def __add__(self, other):
        if isinstance(other, Jet):
            n = self._n(other)
            return Jet(self.c[:n] + other.c[:n])
        c = self.c.copy()
        c[0] += other
        return Jet(c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        if isinstance(other, Jet):
            n = self._n(other)
            return Jet(self.c[:n] - other.c[:n])
        c = self.c.copy()
        c[0] -= other
        return Jet(c)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            n = self._n(other)
            return Jet(np.convolve(self.c[:n], other.c[:n])[:n])
        return Jet(self.c * other)

    __rmul__ = __mul__

    def inverse(self):
        n = len(self.c)
        if self.c[0] == 0:
            raise ZeroDivisionError("jet has no constant term")
        inv = np.zeros(n, dtype=complex)
        inv[0] = 1.0 / self.c[0]
        for m in range(1, n):
            inv[m] = -inv[0] * np.dot(self.c[1 : m + 1], inv[m - 1 :: -1][: m])
        return Jet(inv)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.inverse()
        return Jet(self.c / other)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def deriv(self):
        if len(self.c) == 1:
            return Jet([0.0])
        return Jet(self.c[1:] * np.arange(1, len(self.c)))

    def shift_down(self, k=1, check=1e-9):
        """Divide by x^k; the dropped coefficients must be negligible."""
        drop = self.c[:k]
        scale = max(1.0, np.abs(self.c).max())
        if np.abs(drop).max() > check * scale:
            raise ValueError("shift_down drops non-vanishing coefficients")
        return Jet(self.c[k:])

    def truncate(self, order):
        return Jet(self.c[: order + 1])

    def __repr__(self):
        return "Jet(%s)" % (np.array2string(self.c, precision=6),)


class Jet2:
    """Bivariate jet sum_{i,j} c[i,j] u^i v^j."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=complex)

    @classmethod
    def zero(cls, nu, nv):
        return cls(np.zeros((nu + 1, nv + 1), dtype=complex))

    @classmethod
    def mono(cls, i, j, nu, nv, val=1.0):
        c = np.zeros((nu + 1, nv + 1), dtype=complex)
        if i <= nu and j <= nv:
            c[i, j] = val
        return cls(c)

    @classmethod
    def u_var(cls, nu, nv):
        return cls.mono(1, 0, nu, nv)

    @classmethod
    def v_var(cls, nu, nv):
        return cls.mono(0, 1, nu, nv)

    @property
    def shape(self):
        return self.c.shape

    def _shape(self, other):
        return (
            min(self.c.shape[0], other.c.shape[0]),
            min(self.c.shape[1], other.c.shape[1]),
        )

    def __add__(self, other):
        if isinstance(other, Jet2):
            a, b = self._shape(other)
            return Jet2(self.c[:a, :b] + other.c[:a, :b])
        c = self.c.copy()
        c[0, 0] += other
        return Jet2(c)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet2) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            a, b = self._shape(other)
            out = np.zeros((a, b), dtype=complex)
            x, y = self.c, other.c
            for i in range(a):
                for j in range(b):
                    out[i:a, j:b] += x[i, j] * y[: a - i, : b - j]
            return Jet2(out)
        return Jet2(self.c * other)

    __rmul__ = __mul__

    def max_abs(self):
        return float(np.abs(self.c).max())

    def __repr__(self):
        return "Jet2(shape=%s, max=%.3g)" % (self.c.shape, self.max_abs())


def powers(p, count):
    """[p^0, p^1, ..., p^count] for a Jet2 p."""
    nu = p.c.shape[0] - 1
    nv = p.c.shape[1] - 1
    out = [Jet2.mono(0, 0, nu, nv)]
    for _ in range(count):
        out.append(out[-1] * p)
    return out


def series_at(coeffs, ppow):
    """sum_m coeffs[m] * p^m given precomputed powers of p."""
    n = min(len(coeffs), len(ppow))
    out = ppow[0] * 0.0
    for m in range(n):
        out = out + ppow[m] * coeffs[m]
    return out


def div_diff1(coeffs, ppow, qpow):
    """(f(p) - f(q)) / (p - q) = sum_m c_m sum_{a+b=m-1} p^a q^b."""
    out = ppow[0] * 0.0
    n = min(len(coeffs), len(ppow), len(qpow))
    for m in range(1, n):
        acc = ppow[0] * 0.0
        for a in range(m):
            acc = acc + ppow[a] * qpow[m - 1 - a]
        out = out + acc * coeffs[m]
    return out


def div_diff2(coeffs, ppow, qpow):
    """(f(p) - f(q) - (p-q) f'(q)) / (p-q)^2
    = sum_m c_m sum_{i+j=m-2} (j+1) q^j p^i."""
    out = ppow[0] * 0.0
    n = min(len(coeffs), len(ppow), len(qpow))
    for m in range(2, n):
        acc = ppow[0] * 0.0
        for i in range(m - 1):
            j = m - 2 - i
            acc = acc + ppow[i] * qpow[j] * (j + 1)
        out = out + acc * coeffs[m]
    return out
