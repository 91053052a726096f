"""Brute-force reference computations for tests.

Nothing here shares multiplication code with :mod:`nonconv.cocycle`: the
extended-precision product is done in double-double arithmetic (error-free
transformations, no FMA), and the final norm is taken with mpmath.
"""

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import ProductOverflow

_SPLITTER = 134217729.0  # 2^27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def dd_add(ahi, alo, bhi, blo):
    """Accurate double-double addition (works elementwise on arrays)."""
    s, e = two_sum(ahi, bhi)
    t, f = two_sum(alo, blo)
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


def dd_mul(ahi, alo, bhi, blo):
    p, e = two_prod(ahi, bhi)
    e = e + (ahi * blo + alo * bhi)
    return quick_two_sum(p, e)


@dataclass(frozen=True)
class DoubleDouble:
    """Unevaluated sum hi + lo with |lo| <= ulp(hi)/2."""

    hi: float
    lo: float = 0.0

    @classmethod
    def of(cls, x):
        return x if isinstance(x, DoubleDouble) else cls(float(x), 0.0)

    def __add__(self, other):
        other = DoubleDouble.of(other)
        return DoubleDouble(*dd_add(self.hi, self.lo, other.hi, other.lo))

    __radd__ = __add__

    def __neg__(self):
        return DoubleDouble(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-DoubleDouble.of(other))

    def __mul__(self, other):
        other = DoubleDouble.of(other)
        return DoubleDouble(*dd_mul(self.hi, self.lo, other.hi, other.lo))

    __rmul__ = __mul__

    def __float__(self):
        return self.hi + self.lo

    def to_mpf(self):
        return mpmath.mpf(self.hi) + mpmath.mpf(self.lo)


def _dd_matmul(Ahi, Alo, Bhi, Blo):
    d = Ahi.shape[0]
    Chi = np.zeros((d, d))
    Clo = np.zeros((d, d))
    for k in range(d):
        phi, plo = dd_mul(Ahi[:, k:k + 1], Alo[:, k:k + 1], Bhi[k:k + 1, :], Blo[k:k + 1, :])
        Chi, Clo = dd_add(Chi, Clo, phi, plo)
    return Chi, Clo


def _mp_lognorm(hi, lo, exponent):
    with mpmath.workdps(40):
        M = mpmath.matrix(hi.shape[0], hi.shape[1])
        for i in range(hi.shape[0]):
            for j in range(hi.shape[1]):
                M[i, j] = mpmath.mpf(float(hi[i, j])) + mpmath.mpf(float(lo[i, j]))
        s = mpmath.svd_r(M, compute_uv=False)
        top = max(s[i] for i in range(len(s)))
        return float(mpmath.log(top) + exponent * mpmath.log(2))


def direct_product_lognorm(matrices, precision="extended", rescale=True):
    """ln ||M_N ... M_1|| by straightforward left multiplication.

    ``precision="extended"`` accumulates in double-double; ``"standard"`` in
    plain doubles. Rescaling by powers of two is exact in both modes; with
    ``rescale=False`` the standard mode raises ProductOverflow when the
    product leaves the floating range.
    """
    mats = np.asarray(matrices, dtype=float)
    d = mats.shape[-1]
    exponent = 0
    if precision == "extended":
        hi, lo = np.eye(d), np.zeros((d, d))
        for X in mats:
            hi, lo = _dd_matmul(X, np.zeros((d, d)), hi, lo)
            if rescale:
                k = int(math.frexp(float(np.abs(hi).max()))[1])
                if abs(k) > 16:
                    hi, lo = np.ldexp(hi, -k), np.ldexp(lo, -k)
                    exponent += k
        return _mp_lognorm(hi, lo, exponent)
    if precision != "standard":
        raise ValueError("precision must be 'standard' or 'extended'")
    P = np.eye(d)
    for X in mats:
        with np.errstate(over="ignore", invalid="ignore"):
            P = X @ P
        if rescale:
            k = int(math.frexp(float(np.abs(P).max()))[1])
            if abs(k) > 16:
                P = np.ldexp(P, -k)
                exponent += k
        elif not np.all(np.isfinite(P)) or not np.any(P):
            raise ProductOverflow("product left the double range; enable rescaling")
    return _mp_lognorm(P, np.zeros_like(P), exponent)


def exact_svd_2x2(M):
    """Closed form from ||M||_F^2 = s1^2 + s2^2 and |det M| = s1 s2.

    The determinant is formed from error-free products so that s2 keeps its
    relative accuracy when M is ill-conditioned.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise ValueError("exact_svd_2x2 needs a 2x2 matrix")
    F = float(np.sum(M * M))
    p1, e1 = two_prod(float(M[0, 0]), float(M[1, 1]))
    p2, e2 = two_prod(float(M[0, 1]), float(M[1, 0]))
    D = abs((p1 - p2) + (e1 - e2))
    root = math.sqrt(max((F - 2 * D) * (F + 2 * D), 0.0))
    s1 = math.sqrt((F + root) / 2.0)
    s2 = D / s1 if s1 > 0 else 0.0
    return np.array([s1, s2])
