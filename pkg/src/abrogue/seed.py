"""Plane-wave background of the AB system and its Lax-pair eigenfunctions.

The background is the periodic plane wave ``A0 = exp(i*theta)``,
``B0 = -a/sqrt(1+a^2)`` with ``theta = (a*sqrt(1+a^2)*x + t)/sqrt(1+a^2)``.
Eigenfunctions of the associated linear system are provided two ways:

* ``eigenfunction_generic`` evaluates the closed solution at a generic
  spectral parameter (scalar arithmetic).
* ``eigenfunction_jet`` expands the same solution about the rogue-wave
  spectral point ``lambda1 = -a/2 + i/2`` in the perturbation variable f
  (``lambda = lambda1 + f^2``) and returns truncated series whose even
  coefficients feed the transformation chain.

The discriminant ``4*lambda^2 + 4*a*lambda + 1 + a^2`` vanishes at
``lambda1``; on the jet path it is therefore assembled in the pre-factored
form ``4*f^2*(i + f^2)`` so its square root is an explicit f times a regular
series and no catastrophic cancellation occurs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import DualC, LaurentJet
from .errors import ConsistencyError, SpectralPointError

__all__ = [
    "SeedConfig", "SpectralPoint", "EigenPair", "rogue_lambda",
    "theta_phase", "plane_wave_seed", "eigenfunction_generic",
    "eigenfunction_jet",
]


def rogue_lambda(a):
    """Fixed spectral point of the rogue-wave construction."""
    return complex(-0.5 * a, 0.5)


@dataclass(frozen=True)
class SeedConfig:
    """Background parameter, solution order, and free structural parameters.

    ``s[k-1]`` is the complex parameter ``m_k + i*n_k`` entering the
    eigenfunction at order f^(2k); an order-N solution has N-1 of them.
    """

    a: float
    order: int
    s: tuple = ()

    def __post_init__(self):
        if not math.isfinite(self.a):
            raise ValueError("background parameter must be finite")
        if self.order < 1:
            raise ValueError("solution order must be >= 1")
        object.__setattr__(self, "s", tuple(complex(v) for v in self.s))
        if len(self.s) != self.order - 1:
            raise ValueError(
                f"order {self.order} needs {self.order - 1} structural "
                f"parameters, got {len(self.s)}")

    @property
    def jet_window(self):
        """Tracked series order: 2(N-1) consumed by the limits plus guards."""
        return 2 * self.order + 4

    @property
    def pole_floor(self):
        """Deepest admissible pole; anything lower flags a bug."""
        return -(2 * self.order + 2)


@dataclass(frozen=True)
class SpectralPoint:
    lam: complex

    def __post_init__(self):
        if self.lam == 0:
            raise SpectralPointError("spectral parameter must be nonzero")


@dataclass(frozen=True)
class EigenPair:
    """Components of a column eigenfunction, with t-derivative channels."""

    psi: DualC
    phi: DualC


def theta_phase(a, x, t):
    """Plane-wave phase as a DualC in t."""
    sg = math.sqrt(1.0 + a * a)
    return DualC((a * sg * x + t) / sg, 1.0 / sg)


def plane_wave_seed(a, x, t):
    """Background fields (A0 with derivative channel, real B0)."""
    sg = math.sqrt(1.0 + a * a)
    th = theta_phase(a, x, t)
    a0 = (th * 1j).exp()
    return a0, -a / sg


def _discriminant(a, lam):
    return 4.0 * lam * lam + 4.0 * a * lam + (1.0 + a * a)


def eigenfunction_generic(a, lam, x, t, s=()):
    """Eigenfunction of the linear system at a generic spectral parameter.

    The free parameters ``s`` enter through powers of ``lam - lambda1`` so
    that sampling near the rogue spectral point reproduces the jet path.
    Raises for ``lam = 0`` (the t-part of the system is singular there) and
    for a vanishing discriminant (use ``eigenfunction_jet`` instead).
    """
    lam = complex(lam)
    if abs(lam) < 1e-12:
        raise SpectralPointError("spectral parameter must be nonzero")
    disc = _discriminant(a, lam)
    u = 2.0 * lam + a
    if abs(disc) <= 1e-12 * (1.0 + abs(u) ** 2):
        raise SpectralPointError(
            "degenerate spectral point (zero discriminant); "
            "use the jet expansion path")
    sg = math.sqrt(1.0 + a * a)
    root = np.sqrt(complex(disc))
    c1 = complex(np.sqrt(u - root)) / root
    # tie the second root to the first: the pair solves the linear system
    # for every branch of the outer and inner square roots
    c2 = -1j * (u + root) * c1
    df = complex(lam) - rogue_lambda(a)
    shift = 0j
    for k, sk in enumerate(s, start=1):
        shift += complex(sk) * df ** k
    arg = DualC.var_t(t) + (2.0 * sg * lam * x + shift)
    expo = arg * (1j * root / (4.0 * sg * lam))
    grow = expo.exp()
    decay = (-expo).exp()
    th = theta_phase(a, x, t)
    half_plus = (th * 0.5j).exp()
    half_minus = (th * -0.5j).exp()
    psi = (grow * c1 - decay * c2) * half_plus
    phi = (decay * c1 - grow * c2) * half_minus
    return EigenPair(psi, phi)


def eigenfunction_jet(cfg, x, t):
    """Eigenfunction expanded about the rogue spectral point.

    Returns ``(psi, phi)`` as Laurent jets in f with all negative and odd
    coefficients verified to cancel and stripped; the coefficient of f^(2k)
    is the k-th Taylor coefficient consumed by the transformation chain.
    """
    a = cfg.a
    kw = cfg.jet_window
    sg = math.sqrt(1.0 + a * a)
    lam1 = rogue_lambda(a)

    lam = LaurentJet.from_coeffs(0, [lam1, 0.0, 1.0], window=kw)
    # discriminant pre-factored as 4 f^2 (i + f^2)
    disc = LaurentJet.from_coeffs(2, [4j, 0.0, 4.0], window=kw)
    u = LaurentJet.from_coeffs(0, [1j, 0.0, 2.0], window=kw)  # 2*lam + a
    root = disc.sqrt()
    c1 = (u - root).sqrt() / root
    c2 = ((u + root) * c1) * (-1j)

    svals = [0j] * (kw + 1)
    for k, sk in enumerate(cfg.s, start=1):
        svals[2 * k] = complex(sk)
    poly = (lam * (2.0 * sg * x)
            + LaurentJet.from_coeffs(0, svals)
            + DualC.var_t(t))
    expo = root * poly * (0.25j / sg) / lam
    grow = expo.exp()
    decay = (-expo).exp()

    th = theta_phase(a, x, t)
    half_plus = (th * 0.5j).exp()
    half_minus = (th * -0.5j).exp()
    psi = (c1 * grow - c2 * decay) * half_plus
    phi = (c1 * decay - c2 * grow) * half_minus

    floor = cfg.pole_floor
    if min(psi.min_order, phi.min_order) < floor:
        raise ConsistencyError(
            f"eigenfunction jet has a pole below f^{floor}; "
            "transformation bookkeeping is corrupt")
    return psi.require_even(), phi.require_even()
