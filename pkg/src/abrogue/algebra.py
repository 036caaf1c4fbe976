"""Scalar and series algebra underlying the solver.

Three nested, immutable algebras:

* ``DualC``: a complex value paired with its exact d/dt derivative.  All
  arithmetic obeys the Leibniz and chain rules, so any expression built from
  ``DualC`` inputs carries an analytic t-derivative with no finite
  differencing.
* ``LaurentJet``: a truncated Laurent series in a real perturbation variable
  with ``DualC`` coefficients.  It mechanises the limit processes of the
  transformation chain: series square roots, exponentials, and division with
  poles up to the tracked depth.
* ``Mat2``: a 2x2 matrix over any scalar that supports ``+ - * /``
  (complex, ``DualC`` or ``LaurentJet`` entries all work).

Truncation model: a jet knows its coefficients for exponents
``min_order .. min_order + len - 1`` (its window), is exactly zero below the
window, and unknown above it.  Window bookkeeping follows the usual sound
rules (products add minimum orders and keep the shorter window, sums align
to the lower minimum order and keep the lower top).
"""

from __future__ import annotations

import cmath

import numpy as np

from .errors import (
    ConsistencyError,
    JetBranchError,
    JetDomainError,
    JetOrderError,
    SingularMatrixError,
)

_ZERO = 0j


class DualC:
    """Complex scalar carrying an exact t-derivative channel."""

    __slots__ = ("val", "dt")

    def __init__(self, val, dt=_ZERO):
        self.val = complex(val)
        self.dt = complex(dt)

    @staticmethod
    def constant(z):
        return DualC(z, _ZERO)

    @staticmethod
    def var_t(t):
        """The coordinate t itself: value t, derivative 1."""
        return DualC(t, 1.0)

    def __repr__(self):
        return f"DualC({self.val!r}, dt={self.dt!r})"

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, DualC):
            return DualC(self.val + other.val, self.dt + other.dt)
        if isinstance(other, (int, float, complex)):
            return DualC(self.val + other, self.dt)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, DualC):
            return DualC(self.val - other.val, self.dt - other.dt)
        if isinstance(other, (int, float, complex)):
            return DualC(self.val - other, self.dt)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float, complex)):
            return DualC(other - self.val, -self.dt)
        return NotImplemented

    def __neg__(self):
        return DualC(-self.val, -self.dt)

    def __mul__(self, other):
        if isinstance(other, DualC):
            return DualC(self.val * other.val,
                         self.dt * other.val + self.val * other.dt)
        if isinstance(other, (int, float, complex)):
            return DualC(self.val * other, self.dt * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DualC):
            v = self.val / other.val
            return DualC(v, (self.dt - v * other.dt) / other.val)
        if isinstance(other, (int, float, complex)):
            return DualC(self.val / other, self.dt / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, float, complex)):
            v = other / self.val
            return DualC(v, -v * self.dt / self.val)
        return NotImplemented

    # -- analytic extensions ----------------------------------------------

    def conj(self):
        # t is real, so conjugation commutes with d/dt
        return DualC(self.val.conjugate(), self.dt.conjugate())

    def abs2(self):
        """|z|^2 with its derivative; both channels are exactly real."""
        v = self.val.real * self.val.real + self.val.imag * self.val.imag
        d = 2.0 * (self.dt.real * self.val.real + self.dt.imag * self.val.imag)
        return DualC(v, d)

    def exp(self):
        e = cmath.exp(self.val)
        return DualC(e, e * self.dt)

    def sqrt(self):
        r = cmath.sqrt(self.val)  # principal branch
        if r == 0:
            raise JetDomainError("square root of dual-complex zero")
        return DualC(r, self.dt / (2.0 * r))

    def is_finite(self):
        return all(map(cmath.isfinite, (self.val, self.dt)))


def _as_pair(value):
    if isinstance(value, DualC):
        return value.val, value.dt
    return complex(value), _ZERO


class LaurentJet:
    """Truncated Laurent series with DualC coefficients.

    Coefficients are stored as a complex array of shape ``(2, L)``:
    row 0 holds values, row 1 their t-derivatives, for exponents
    ``min_order .. min_order + L - 1``.
    """

    __slots__ = ("min_order", "c")

    def __init__(self, min_order, coeffs, dts=None):
        if dts is not None:
            c = np.stack([np.asarray(coeffs, dtype=complex),
                          np.asarray(dts, dtype=complex)])
        else:
            arr = np.asarray(coeffs)
            if arr.ndim == 2:
                c = arr.astype(complex)
            else:
                pairs = [_as_pair(v) for v in coeffs]
                c = np.array(pairs, dtype=complex).T if pairs else np.zeros((2, 0))
        if c.shape[0] != 2 or c.shape[1] == 0:
            raise JetOrderError("jet needs at least one tracked coefficient")
        self.min_order = int(min_order)
        self.c = c

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value, window):
        """Constant jet tracked through exponent ``window``."""
        c = np.zeros((2, window + 1), dtype=complex)
        c[0, 0], c[1, 0] = _as_pair(value)
        return LaurentJet(0, c)

    @staticmethod
    def monomial(value, order, window):
        c = np.zeros((2, window + 1), dtype=complex)
        c[0, 0], c[1, 0] = _as_pair(value)
        return LaurentJet(order, c)

    @staticmethod
    def from_coeffs(min_order, values, window=None):
        """Jet from a coefficient list (complex or DualC entries)."""
        pairs = [_as_pair(v) for v in values]
        c = np.array(pairs, dtype=complex).T
        if window is not None and window + 1 > c.shape[1]:
            pad = np.zeros((2, window + 1 - c.shape[1]), dtype=complex)
            c = np.hstack([c, pad])
        return LaurentJet(min_order, c)

    # -- inspection ----------------------------------------------------------

    @property
    def length(self):
        return self.c.shape[1]

    @property
    def top_order(self):
        return self.min_order + self.length - 1

    def coeff(self, exponent):
        """Coefficient of f**exponent as a DualC; exact zero below the window."""
        if exponent < self.min_order:
            return DualC(_ZERO)
        i = exponent - self.min_order
        if i >= self.length:
            raise JetOrderError(
                f"coefficient f^{exponent} beyond tracked window "
                f"(top f^{self.top_order}); raise the guard order")
        return DualC(self.c[0, i], self.c[1, i])

    def taylor(self, k):
        """Coefficient of f**(2k); the natural index for even jets."""
        return self.coeff(2 * k)

    def max_abs(self):
        return float(np.max(np.abs(self.c))) if self.length else 0.0

    def __repr__(self):
        return f"LaurentJet(min_order={self.min_order}, L={self.length})"

    def _lead(self):
        """Index of the first coefficient with a nonzero value channel."""
        nz = np.nonzero(self.c[0])[0]
        return int(nz[0]) if nz.size else None

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, LaurentJet):
            m = min(self.min_order, other.min_order)
            top = min(self.top_order, other.top_order)
            if top < m:
                raise JetOrderError("jet windows do not overlap")
            out = np.zeros((2, top - m + 1), dtype=complex)
            for j in (self, other):
                lo = j.min_order - m
                n = min(j.length, top - j.min_order + 1)
                out[:, lo:lo + n] += j.c[:, :n]
            return LaurentJet(m, out)
        if isinstance(other, (int, float, complex, DualC)):
            return self + LaurentJet.constant(other, max(self.top_order, 0))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return LaurentJet(self.min_order, -self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, LaurentJet)
                       else -1 * other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentJet):
            n = min(self.length, other.length)
            val = np.convolve(self.c[0], other.c[0])[:n]
            dt = (np.convolve(self.c[1], other.c[0])
                  + np.convolve(self.c[0], other.c[1]))[:n]
            return LaurentJet(self.min_order + other.min_order,
                              np.stack([val, dt]))
        if isinstance(other, (int, float, complex, DualC)):
            v, d = _as_pair(other)
            return LaurentJet(self.min_order,
                              np.stack([self.c[0] * v,
                                        self.c[1] * v + self.c[0] * d]))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, DualC)):
            v, d = _as_pair(other)
            if v == 0:
                raise JetDomainError("jet divided by scalar with zero value")
            inv_v = 1.0 / v
            val = self.c[0] * inv_v
            dt = (self.c[1] - val * d) * inv_v
            return LaurentJet(self.min_order, np.stack([val, dt]))
        if not isinstance(other, LaurentJet):
            return NotImplemented
        z = other._lead()
        if z is None:
            raise JetDomainError("division by a zero jet")
        bv = other.c[0, z:]
        bd = other.c[1, z:]
        n = min(self.length, bv.size)
        rv = np.zeros(n, dtype=complex)
        rd = np.zeros(n, dtype=complex)
        b0v, b0d = bv[0], bd[0]
        for k in range(n):
            sv = self.c[0, k] - np.dot(rv[:k], bv[k:0:-1])
            sd = (self.c[1, k] - np.dot(rd[:k], bv[k:0:-1])
                  - np.dot(rv[:k], bd[k:0:-1]))
            rv[k] = sv / b0v
            rd[k] = (sd - rv[k] * b0d) / b0v
        return LaurentJet(self.min_order - other.min_order - z,
                          np.stack([rv, rd]))

    def __rtruediv__(self, other):
        if isinstance(other, (int, float, complex, DualC)):
            num = LaurentJet.constant(other, self.length - 1)
            return num / self
        return NotImplemented

    def shift(self, k):
        """Multiply by f**k (relabels exponents, no data change)."""
        return LaurentJet(self.min_order + k, self.c)

    def conj(self):
        # the perturbation variable is real, so conjugate coefficients only
        return LaurentJet(self.min_order, np.conj(self.c))

    # -- analytic extensions ---------------------------------------------------

    def sqrt(self):
        """Series square root; principal branch on the leading coefficient."""
        z = self._lead()
        if z is None:
            raise JetDomainError("square root of a zero jet")
        m = self.min_order + z
        if m % 2:
            raise JetBranchError(
                f"square root of jet with odd leading exponent f^{m}")
        bv = self.c[0, z:]
        bd = self.c[1, z:]
        n = bv.size
        sv = np.zeros(n, dtype=complex)
        sd = np.zeros(n, dtype=complex)
        s0 = DualC(bv[0], bd[0]).sqrt()
        sv[0], sd[0] = s0.val, s0.dt
        two_v, two_d = 2.0 * s0.val, 2.0 * s0.dt
        for k in range(1, n):
            av = bv[k] - np.dot(sv[1:k], sv[k - 1:0:-1])
            # the cross sum is symmetric in the two factors
            ad = bd[k] - 2.0 * np.dot(sd[1:k], sv[k - 1:0:-1])
            sv[k] = av / two_v
            sd[k] = (ad - sv[k] * two_d) / two_v
        return LaurentJet(m // 2, np.stack([sv, sd]))

    def exp(self):
        """Series exponential; requires a pole-free jet."""
        if self.min_order < 0:
            raise JetDomainError(
                "exponential of a jet with a pole (essential singularity)")
        top = self.top_order
        h = np.zeros((2, top + 1), dtype=complex)
        h[:, self.min_order:self.min_order + self.length] = self.c
        c0 = DualC(h[0, 0], h[1, 0])
        h[:, 0] = 0.0
        rv = np.zeros(top + 1, dtype=complex)
        rd = np.zeros(top + 1, dtype=complex)
        rv[0] = 1.0
        for k in range(top, 0, -1):
            nv = np.convolve(h[0], rv)[:top + 1]
            nd = (np.convolve(h[1], rv) + np.convolve(h[0], rd))[:top + 1]
            rv = nv / k
            rd = nd / k
            rv[0] += 1.0
        scale = c0.exp()
        return LaurentJet(0, np.stack([rv * scale.val,
                                       rd * scale.val + rv * scale.dt]))

    # -- structure checks -------------------------------------------------------

    def require_even(self, tol=1e-9):
        """Assert negative and odd coefficients are numerically zero, drop them.

        Residues above ``tol`` times the largest coefficient magnitude signal
        a branch or transcription bug and raise instead of being discarded.
        """
        scale = self.max_abs()
        if scale == 0.0:
            return LaurentJet(0, np.zeros((2, max(self.top_order, 0) + 1),
                                          dtype=complex))
        for i in range(self.length):
            e = self.min_order + i
            if e < 0 or e % 2:
                mag = max(abs(self.c[0, i]), abs(self.c[1, i]))
                if mag > tol * scale:
                    raise ConsistencyError(
                        f"coefficient at f^{e} should vanish but has "
                        f"magnitude {mag:.3e} (scale {scale:.3e})")
        if self.top_order < 0:
            raise JetOrderError("jet has no nonnegative exponents left")
        out = np.zeros((2, self.top_order + 1), dtype=complex)
        lo = max(self.min_order, 0)
        out[:, lo:] = self.c[:, lo - self.min_order:]
        out[:, 1::2] = 0.0
        return LaurentJet(0, out)


def jet_sqrt(j):
    """Square root of a jet (principal branch on the leading coefficient)."""
    return j.sqrt()


def jet_exp(j):
    """Exponential of a pole-free jet."""
    return j.exp()


class Mat2:
    """2x2 matrix over a scalar algebra (complex, DualC or LaurentJet)."""

    __slots__ = ("e11", "e12", "e21", "e22")

    def __init__(self, e11, e12, e21, e22):
        self.e11, self.e12, self.e21, self.e22 = e11, e12, e21, e22

    def __repr__(self):
        return f"Mat2({self.e11!r}, {self.e12!r}, {self.e21!r}, {self.e22!r})"

    def __add__(self, other):
        return Mat2(self.e11 + other.e11, self.e12 + other.e12,
                    self.e21 + other.e21, self.e22 + other.e22)

    def __sub__(self, other):
        return Mat2(self.e11 - other.e11, self.e12 - other.e12,
                    self.e21 - other.e21, self.e22 - other.e22)

    def __matmul__(self, other):
        return Mat2(
            self.e11 * other.e11 + self.e12 * other.e21,
            self.e11 * other.e12 + self.e12 * other.e22,
            self.e21 * other.e11 + self.e22 * other.e21,
            self.e21 * other.e12 + self.e22 * other.e22,
        )

    def scaled(self, s):
        return Mat2(self.e11 * s, self.e12 * s, self.e21 * s, self.e22 * s)

    def det(self):
        return self.e11 * self.e22 - self.e12 * self.e21

    def mv(self, u, v):
        """Matrix-vector product on a column (u, v)."""
        return (self.e11 * u + self.e12 * v,
                self.e21 * u + self.e22 * v)

    def inv(self):
        d = self.det()
        try:
            return Mat2(self.e22 / d, -self.e12 / d,
                        -self.e21 / d, self.e11 / d)
        except (ZeroDivisionError, JetDomainError) as exc:
            raise SingularMatrixError(f"singular 2x2 matrix: {exc}") from exc


def mat2_inv(m):
    """Inverse of a 2x2 matrix; raises SingularMatrixError when det = 0."""
    return m.inv()
