"""Closed-form first- and second-order rogue-wave fields.

This module is an independent evaluation route used both as a fast path for
grids and as an oracle against the transformation engine.  The long printed
polynomials are transcribed as coefficient tables rather than free-form
expressions: each term is ``(px, pt, pm, pn, half, apoly)`` meaning

    coeff(a) * x**px * t**pt * m1**pm * n1**pn * sqrt(1+a^2)**half

with ``apoly`` a tuple of ``(a_power, complex_coefficient)`` pairs.  Tables
are mechanically testable against the engine and easy to audit term by term.

Everything accepts scalars or numpy arrays for ``x`` and ``t``; derivative
channels are carried as explicit ``(value, d/dt)`` pairs so the vectorised
path never touches finite differences.  The update arithmetic is written out
locally on purpose: this route must not share code with the engine it
cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import DualC
from .seed import EigenPair

__all__ = [
    "FirstOrderPolys", "SecondOrderParts",
    "first_order", "second_order", "first_order_parts", "second_order_parts",
    "first_order_fields", "second_order_fields", "seed_fields",
    "eigenfunction_coeff0_closed", "eigenfunction_coeff1_closed",
    "eigenfunction_level1_closed",
]


# ---------------------------------------------------------------------------
# coefficient tables
# ---------------------------------------------------------------------------

_F1_TERMS = (
    (2, 0, 0, 0, 0, ((4, 2), (2, 4), (0, 2))),
    (1, 1, 0, 0, 1, ((1, -4),)),
    (0, 2, 0, 0, 0, ((0, 2),)),
    (0, 0, 0, 0, 0, ((4, -2), (2, -4), (0, -2))),
)

_H1_TERMS = (
    (0, 1, 0, 0, 1, ((0, 4),)),
)

_D1_TERMS = (
    (2, 0, 0, 0, 0, ((4, -1), (2, -2), (0, -1))),
    (1, 1, 0, 0, 1, ((1, 2),)),
    (0, 2, 0, 0, 0, ((0, -1),)),
    (0, 0, 0, 0, 0, ((4, -1), (2, -2), (0, -1))),
)

_G1_TERMS = (
    (4, 0, 0, 0, 0, ((9, -1), (7, -4), (5, -6), (3, -4), (1, -1))),
    (3, 1, 0, 0, 1, ((6, 4), (4, 8), (2, 4))),
    (2, 2, 0, 0, 0, ((5, -6), (3, -8), (1, -2))),
    (2, 0, 0, 0, 0, ((9, -2), (7, -12), (5, -24), (3, -20), (1, -6))),
    (1, 3, 0, 0, 1, ((2, 4),)),
    (1, 1, 0, 0, 1, ((6, 4), (4, 16), (2, 20), (0, 8))),
    (0, 4, 0, 0, 0, ((1, -1),)),
    (0, 2, 0, 0, 0, ((5, -2), (3, -8), (1, -6))),
    (0, 0, 0, 0, 0, ((9, -1), (5, 6), (3, 8), (1, 3))),
)

# degree-4 pattern shared by most terms of the first Taylor correction
_Q4 = ((4, 3), (3, -6j), (1, -6j), (0, -3))
_Q4_THIRD = ((4, 1), (3, -2j), (1, -2j), (0, -1))
_Q4_NEG = ((4, -3), (3, 6j), (1, 6j), (0, 3))
_Q4_DOUBLE = ((4, 6), (3, -12j), (1, -12j), (0, -6))
_Q4_DOUBLE_NEG = ((4, -6), (3, 12j), (1, 12j), (0, 6))

_C1_PSI_BRACKET = (
    (3, 0, 0, 0, 0, _Q4_THIRD),
    (2, 0, 0, 0, 0, _Q4),
    (1, 0, 0, 0, 0, _Q4),
    (1, 2, 0, 0, 0, ((0, 3),)),
    (0, 2, 0, 0, 0, ((0, 3),)),
    (0, 0, 0, 0, 0, _Q4_NEG),
)

_C1_PSI_TAIL = (
    (0, 3, 0, 0, 0, ((0, 1),)),
    (2, 1, 0, 0, 0, _Q4),
    (1, 1, 0, 0, 0, _Q4_DOUBLE),
    (0, 1, 0, 0, 0, ((4, 3), (3, 6j), (2, 12), (1, 6j), (0, 9))),
    (0, 0, 1, 0, 0, ((4, 6j), (3, 12), (1, 12), (0, -6j))),
    (0, 0, 0, 1, 0, ((4, -6), (3, 12j), (1, 12j), (0, 6))),
)

_C1_PHI_BRACKET = (
    (3, 0, 0, 0, 0, _Q4_THIRD),
    (2, 0, 0, 0, 0, _Q4_NEG),
    (1, 0, 0, 0, 0, _Q4),
    (1, 2, 0, 0, 0, ((0, 3),)),
    (0, 2, 0, 0, 0, ((0, -3),)),
    (0, 0, 0, 0, 0, _Q4),
)

_C1_PHI_TAIL = (
    (0, 3, 0, 0, 0, ((0, 1),)),
    (2, 1, 0, 0, 0, _Q4),
    (1, 1, 0, 0, 0, _Q4_DOUBLE_NEG),
    (0, 1, 0, 0, 0, ((4, 3), (3, 6j), (2, 12), (1, 6j), (0, 9))),
    (0, 0, 1, 0, 0, ((4, 6j), (3, 12), (1, 12), (0, -6j))),
    (0, 0, 0, 1, 0, ((4, -6), (3, 12j), (1, 12j), (0, 6))),
)

# degree-8 pattern shared by the quartic bracket terms of the level-1 pair
_P8 = ((8, -1), (7, 2j), (6, -2), (5, 6j), (3, 6j), (2, 2), (1, 2j), (0, 1))


def _scaled(poly, c):
    return tuple((p, c * v) for p, v in poly)


# m/n polynomials shared by the level-1 tails
_L1_M = ((7, -3j), (6, -3), (5, -9j), (4, -9), (3, -9j), (2, -9), (1, -3j), (0, -3))
_L1_N = ((7, 3), (6, -3j), (5, 9), (4, -9j), (3, 9), (2, -9j), (1, 3), (0, -3j))

_L1_PSI_BRACKET = (
    (4, 0, 0, 0, 0, _P8),
    (3, 0, 0, 0, 0, _scaled(_P8, 2)),
    (1, 0, 0, 0, 0, _scaled(_P8, 6)),
    (0, 4, 0, 0, 0, ((0, -1),)),
    (2, 2, 0, 0, 0, ((4, -6), (3, 6j), (2, -6), (1, 6j))),
    (1, 2, 0, 0, 0, ((4, -6), (3, 12j), (1, 12j), (0, 6))),
    (0, 2, 0, 0, 0, ((3, 6j), (2, 6), (1, 6j), (0, 6))),
    (0, 1, 1, 0, 0, ((4, 3j), (3, 6), (1, 6), (0, -3j))),
    (0, 1, 0, 1, 0, ((4, -3), (3, 6j), (1, 6j), (0, 3))),
    (0, 0, 0, 0, 0, _scaled(_P8, 3)),
)

_L1_PSI_TAIL = (
    (1, 0, 1, 0, 0, _L1_M),
    (1, 0, 0, 1, 0, _L1_N),
    (1, 3, 0, 0, 0, ((3, 4), (2, -2j), (1, 4), (0, -2j))),
    (0, 3, 0, 0, 0, ((3, 2), (2, -4j), (1, 2), (0, -4j))),
    (3, 1, 0, 0, 0, ((7, 4), (6, -6j), (5, 8), (4, -14j), (3, 4), (2, -10j), (0, -2j))),
    (2, 1, 0, 0, 0, ((7, 6), (6, -12j), (5, 6), (4, -24j), (3, -6), (2, -12j), (1, -6))),
    (1, 1, 0, 0, 0, ((6, -6j), (4, -18j), (2, -18j), (0, -6j))),
    (0, 1, 0, 0, 0, ((7, 6), (5, 18), (3, 18), (1, 6))),
    (0, 0, 1, 0, 0, _scaled(_L1_M, -1)),
    (0, 0, 0, 1, 0, _scaled(_L1_N, -1)),
)

_L1_PHI_BRACKET = (
    (4, 0, 0, 0, 0, _P8),
    (3, 0, 0, 0, 0, _scaled(_P8, -2)),
    (1, 0, 0, 0, 0, _scaled(_P8, -6)),
    (0, 4, 0, 0, 0, ((0, -1),)),
    (2, 2, 0, 0, 0, ((4, -6), (3, 6j), (2, -6), (1, 6j))),
    (1, 2, 0, 0, 0, ((4, 6), (3, -12j), (1, -12j), (0, -6))),
    (0, 2, 0, 0, 0, ((3, 6j), (2, 6), (1, 6j), (0, 6))),
    (0, 1, 1, 0, 0, ((4, 3j), (3, 6), (1, 6), (0, -3j))),
    (0, 1, 0, 1, 0, ((4, -3), (3, 6j), (1, 6j), (0, 3))),
    (0, 0, 0, 0, 0, _scaled(_P8, 3)),
)

_L1_PHI_TAIL = (
    (1, 0, 1, 0, 0, _L1_M),
    (1, 0, 0, 1, 0, _L1_N),
    (1, 3, 0, 0, 0, ((3, 4), (2, -2j), (1, 4), (0, -2j))),
    (0, 3, 0, 0, 0, ((3, -2), (2, 4j), (1, -2), (0, 4j))),
    (3, 1, 0, 0, 0, ((7, 4), (6, -6j), (5, 8), (4, -14j), (3, 4), (2, -10j), (0, -2j))),
    (2, 1, 0, 0, 0, ((7, -6), (6, 12j), (5, -6), (4, 24j), (3, 6), (2, 12j), (1, 6))),
    (1, 1, 0, 0, 0, ((6, -6j), (4, -18j), (2, -18j), (0, -6j))),
    (0, 1, 0, 0, 0, ((7, -6), (5, -18), (3, -18), (1, -6))),
    (0, 0, 1, 0, 0, _L1_M),
    (0, 0, 0, 1, 0, _L1_N),
)


# ---------------------------------------------------------------------------
# evaluation helpers: (value, d/dt) channel pairs over scalars or arrays
# ---------------------------------------------------------------------------

def _eval_terms(terms, a, x, t, m1=0.0, n1=0.0):
    sg = math.sqrt(1.0 + a * a)
    val = 0j * (x + t)
    dt = 0j * val
    for px, pt, pm, pn, half, apoly in terms:
        ca = sum(c * a ** p for p, c in apoly)
        if half:
            ca *= sg
        if pm:
            ca *= m1 ** pm
        if pn:
            ca *= n1 ** pn
        if ca == 0:
            continue
        piece = ca * x ** px if px else ca
        if pt:
            val = val + piece * t ** pt
            dt = dt + piece * pt * (t ** (pt - 1) if pt > 1 else 1.0)
        else:
            val = val + piece
    return val, dt


def _dmul(u, v):
    return u[0] * v[0], u[1] * v[0] + u[0] * v[1]


def _dconj(u):
    return np.conj(u[0]), np.conj(u[1])


def _dabs2(u):
    return (u[0] * np.conj(u[0])).real, 2.0 * (u[1] * np.conj(u[0])).real


def _ddiv(u, v):
    w = u[0] / v[0]
    return w, (u[1] - w * v[1]) / v[0]


def _dexp(u):
    e = np.exp(u[0])
    return e, e * u[1]


def _theta(a, x, t):
    sg = math.sqrt(1.0 + a * a)
    thv = (a * sg * x + t) / sg
    return thv, np.full_like(np.asarray(thv, dtype=float), 1.0 / sg)


# ---------------------------------------------------------------------------
# field evaluation (vectorised cores + scalar wrappers)
# ---------------------------------------------------------------------------

def seed_fields(a, x, t):
    """Background fields as (A value, A derivative, B) arrays."""
    thv, thd = _theta(a, x, t)
    av, ad = _dexp((1j * thv, 1j * thd))
    b = np.full_like(np.asarray(av, dtype=complex).real, -a / math.sqrt(1.0 + a * a))
    return av, ad, b


def first_order_fields(a, x, t):
    """First-order rogue wave as (A value, A derivative, B) arrays."""
    sg = math.sqrt(1.0 + a * a)
    thv, thd = _theta(a, x, t)
    f = _eval_terms(_F1_TERMS, a, x, t)
    h = _eval_terms(_H1_TERMS, a, x, t)
    d = _eval_terms(_D1_TERMS, a, x, t)
    g = _eval_terms(_G1_TERMS, a, x, t)
    ratio = _ddiv((f[0] + 1j * h[0], f[1] + 1j * h[1]), d)
    phase = _dexp((1j * thv, 1j * thd))
    av, ad = _dmul(phase, (1.0 + ratio[0], ratio[1]))
    b = (g[0] / (sg * d[0] * d[0])).real
    return av, ad, b


def _level1_pair_fields(a, m1, n1, x, t):
    """Transformed eigenfunction pair after one step, as channel pairs."""
    sg2 = 1.0 + a * a
    thv, thd = _theta(a, x, t)
    d1 = _eval_terms(_D1_TERMS, a, x, t)
    pre = math.sqrt(2.0) * (-1 + 1j) / (6.0 * (1j - a) ** 2 * sg2 ** 1.5)
    sg = math.sqrt(sg2)
    rho1 = tuple(sg * b + tl for b, tl in zip(
        _eval_terms(_L1_PSI_BRACKET, a, x, t, m1, n1),
        _eval_terms(_L1_PSI_TAIL, a, x, t, m1, n1)))
    rho2 = tuple(sg * b + tl for b, tl in zip(
        _eval_terms(_L1_PHI_BRACKET, a, x, t, m1, n1),
        _eval_terms(_L1_PHI_TAIL, a, x, t, m1, n1)))
    psi = _dmul(_ddiv((pre * rho1[0], pre * rho1[1]), d1),
                _dexp((0.5j * thv, 0.5j * thd)))
    phi = _dmul(_ddiv((pre * rho2[0], pre * rho2[1]), d1),
                _dexp((-0.5j * thv, -0.5j * thd)))
    return psi, phi


def second_order_fields(a, m1, n1, x, t):
    """Second-order rogue wave as (A value, A derivative, B) arrays.

    Composes the transformed eigenfunction pair into the one-step update on
    top of the first-order fields; the two channels keep derivatives exact.
    """
    a1v, a1d, b1 = first_order_fields(a, x, t)
    psi, phi = _level1_pair_fields(a, m1, n1, x, t)
    mp = _dabs2(psi)
    mq = _dabs2(phi)
    den = (mp[0] + mq[0], mp[1] + mq[1])
    if np.any(den[0] <= 0.0):
        raise ZeroDivisionError("transformed eigenfunction norm vanished")
    lam1 = complex(-0.5 * a, 0.5)
    fac = (-4j * (lam1 - lam1.conjugate())).real  # exactly 4
    upd = _ddiv(_dmul(psi, _dconj(phi)), den)
    av = a1v + fac * upd[0]
    ad = a1d + fac * upd[1]
    b = b1 + fac * (mp[0] * mq[1] - mq[0] * mp[1]) / (den[0] * den[0])
    return av, ad, b


def first_order(a, x, t):
    """First-order fields at a point: (A as DualC, real B)."""
    av, ad, b = first_order_fields(a, float(x), float(t))
    return DualC(complex(av), complex(ad)), float(b)


def second_order(a, m1, n1, x, t):
    """Second-order fields at a point: (A as DualC, real B)."""
    av, ad, b = second_order_fields(a, float(m1), float(n1), float(x), float(t))
    return DualC(complex(av), complex(ad)), float(b)


# ---------------------------------------------------------------------------
# polynomial bundles and closed eigenfunction coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FirstOrderPolys:
    """Values of the four first-order building polynomials at a point."""

    F1: float
    H1: float
    D1: float
    G1: float


def first_order_parts(a, x, t):
    return FirstOrderPolys(
        F1=float(_eval_terms(_F1_TERMS, a, float(x), float(t))[0].real),
        H1=float(_eval_terms(_H1_TERMS, a, float(x), float(t))[0].real),
        D1=float(_eval_terms(_D1_TERMS, a, float(x), float(t))[0].real),
        G1=float(_eval_terms(_G1_TERMS, a, float(x), float(t))[0].real),
    )


@dataclass(frozen=True)
class SecondOrderParts:
    """Numerator polynomials feeding the second-order composition."""

    rho1: complex
    rho2: complex
    p1_1: complex
    p2_1: complex
    m1: float
    n1: float


def second_order_parts(a, m1, n1, x, t):
    sg = math.sqrt(1.0 + a * a)
    x = float(x)
    t = float(t)
    rho1 = (sg * _eval_terms(_L1_PSI_BRACKET, a, x, t, m1, n1)[0]
            + _eval_terms(_L1_PSI_TAIL, a, x, t, m1, n1)[0])
    rho2 = (sg * _eval_terms(_L1_PHI_BRACKET, a, x, t, m1, n1)[0]
            + _eval_terms(_L1_PHI_TAIL, a, x, t, m1, n1)[0])
    ia = 1j - a
    p1 = (sg * ia * _eval_terms(_C1_PSI_BRACKET, a, x, t, m1, n1)[0]
          + _eval_terms(_C1_PSI_TAIL, a, x, t, m1, n1)[0])
    p2 = (sg * ia * _eval_terms(_C1_PHI_BRACKET, a, x, t, m1, n1)[0]
          + _eval_terms(_C1_PHI_TAIL, a, x, t, m1, n1)[0])
    return SecondOrderParts(rho1=complex(rho1), rho2=complex(rho2),
                            p1_1=complex(p1), p2_1=complex(p2),
                            m1=float(m1), n1=float(n1))


def eigenfunction_coeff0_closed(a, x, t):
    """Closed zeroth Taylor coefficient of the seed eigenfunction."""
    sg = math.sqrt(1.0 + a * a)
    ia = 1j - a
    x = float(x)
    thv, thd = _theta(a, x, float(t))
    p1 = ((1 - 1j) * sg * ia * x + (1 - 1j) * DualC.var_t(float(t))
          + (1 - 1j) * sg * ia)
    p2 = p1 - 2.0 * (1 - 1j) * sg * ia
    pre = math.sqrt(2.0) / (2.0 * sg * ia)
    up = DualC(0.5j * thv, 0.5j * thd).exp()
    dn = DualC(-0.5j * thv, -0.5j * thd).exp()
    return EigenPair(psi=p1 * -pre * up, phi=p2 * pre * dn)


def eigenfunction_coeff1_closed(a, m1, n1, x, t):
    """Closed first Taylor coefficient (the f^2 term) of the eigenfunction."""
    sg2 = 1.0 + a * a
    sg = math.sqrt(sg2)
    ia = 1j - a
    x = float(x)
    t = float(t)
    thv, thd = _theta(a, x, t)
    p1 = tuple(sg * ia * b + tl for b, tl in zip(
        _eval_terms(_C1_PSI_BRACKET, a, x, t, m1, n1),
        _eval_terms(_C1_PSI_TAIL, a, x, t, m1, n1)))
    p2 = tuple(sg * ia * b + tl for b, tl in zip(
        _eval_terms(_C1_PHI_BRACKET, a, x, t, m1, n1),
        _eval_terms(_C1_PHI_TAIL, a, x, t, m1, n1)))
    pre = math.sqrt(2.0) * (1 + 1j) / (12.0 * ia ** 3 * sg2 ** 1.5)
    psi = _dmul((pre * p1[0], pre * p1[1]), _dexp((0.5j * thv, 0.5j * thd)))
    phi = _dmul((-pre * p2[0], -pre * p2[1]), _dexp((-0.5j * thv, -0.5j * thd)))
    return EigenPair(psi=DualC(complex(psi[0]), complex(psi[1])),
                     phi=DualC(complex(phi[0]), complex(phi[1])))


def eigenfunction_level1_closed(a, m1, n1, x, t):
    """Closed transformed eigenfunction after one step (feeds level 2)."""
    psi, phi = _level1_pair_fields(a, float(m1), float(n1), float(x), float(t))
    return EigenPair(psi=DualC(complex(psi[0]), complex(psi[1])),
                     phi=DualC(complex(phi[0]), complex(phi[1])))
