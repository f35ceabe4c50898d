"""Closed boundary curves in the plane with tubular-coordinate conventions.

Curves are stored as Fourier coefficients of the unit-speed parametrization
gamma(s), so derivatives are spectral and the smoothness assumption is met
exactly.  The interior unit normal nu satisfies det(gamma', nu) = 1 and the
curvature is kappa = <gamma'', nu>; kappa >= 0 for convex domains.  For
exterior domains the normal and the curvature flip sign while s keeps
running in the same geometric direction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

INTERIOR = "interior"
EXTERIOR = "exterior"


@dataclass(frozen=True)
class BoundaryCurve:
    """Unit-speed closed curve given by Fourier coefficients of gamma.

    ``coeffs`` holds complex FFT coefficients (numpy fft layout) of
    gamma_x + i*gamma_y sampled uniformly in arclength; ``length`` is the
    total arclength L, ``side`` flips normal and curvature for exterior
    domains.
    """

    length: float
    coeffs: np.ndarray
    side: str = INTERIOR

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("length must be positive")
        if self.side not in (INTERIOR, EXTERIOR):
            raise ValueError("side must be 'interior' or 'exterior'")
        object.__setattr__(self, "coeffs",
                           np.asarray(self.coeffs, dtype=complex))

    def _eval(self, s: np.ndarray, deriv: int = 0) -> np.ndarray:
        """Evaluate gamma (as complex x+iy) or its s-derivatives spectrally."""
        n = self.coeffs.size
        k = np.fft.fftfreq(n, d=1.0 / n)
        omega = 2.0j * np.pi * k / self.length
        c = self.coeffs * omega**deriv
        phase = np.exp(2.0j * np.pi * np.outer(s / self.length, k))
        return phase @ c / n

    def point(self, s) -> np.ndarray:
        """gamma(s) as an (..., 2) array."""
        z = self._eval(np.atleast_1d(np.asarray(s, dtype=float)))
        return np.stack([z.real, z.imag], axis=-1)

    def tangent(self, s) -> np.ndarray:
        z = self._eval(np.atleast_1d(np.asarray(s, dtype=float)), 1)
        return np.stack([z.real, z.imag], axis=-1)

    def normal(self, s) -> np.ndarray:
        """Interior unit normal with det(gamma', nu) = 1."""
        t = self.tangent(s)
        n = np.stack([-t[..., 1], t[..., 0]], axis=-1)
        return -n if self.side == EXTERIOR else n

    def curvature(self, s) -> np.ndarray:
        """kappa(s) = <gamma''(s), nu(s)> with the convexity sign convention."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        dd = self._eval(s, 2)
        g2 = np.stack([dd.real, dd.imag], axis=-1)
        return np.einsum("...i,...i->...", g2, self.normal(s))

    def validate(self, n_samples: int = 1024, tol: float = 1e-8) -> None:
        """Check the unit-speed, closedness and normal-sign invariants."""
        s = np.linspace(0.0, self.length, n_samples, endpoint=False)
        t = self.tangent(s)
        speed = np.hypot(t[:, 0], t[:, 1])
        if np.abs(speed - 1.0).max() > tol:
            raise ValueError("parametrization is not unit speed")
        nu = self.normal(s)
        det = t[:, 0] * nu[:, 1] - t[:, 1] * nu[:, 0]
        sign = -1.0 if self.side == EXTERIOR else 1.0
        if np.abs(det - sign).max() > 1e-10:
            raise ValueError("normal orientation violated")
        p0 = self.point(np.array([0.0]))
        p1 = self.point(np.array([self.length]))
        if np.hypot(*(p1 - p0)[0]) > tol:
            raise ValueError("curve is not closed")

    def to_json(self) -> str:
        return json.dumps({
            "length": self.length, "side": self.side,
            "coeffs_re": self.coeffs.real.tolist(),
            "coeffs_im": self.coeffs.imag.tolist(),
        })

    @staticmethod
    def from_json(text: str) -> "BoundaryCurve":
        d = json.loads(text)
        c = np.array(d["coeffs_re"]) + 1j * np.array(d["coeffs_im"])
        return BoundaryCurve(length=d["length"], coeffs=c, side=d["side"])


def circle(R: float, side: str = INTERIOR, n_modes: int = 64) -> BoundaryCurve:
    """Circle of radius R; kappa = +1/R (interior) or -1/R (exterior)."""
    if R <= 0:
        raise ValueError("R must be positive")
    L = 2.0 * np.pi * R
    s = np.linspace(0.0, L, n_modes, endpoint=False)
    z = R * np.exp(1j * s / R)
    return BoundaryCurve(length=L, coeffs=np.fft.fft(z), side=side)


def ellipse(a: float, b: float, side: str = INTERIOR,
            n_modes: int = 512) -> BoundaryCurve:
    """Ellipse with semiaxes a, b, reparametrized by arclength.

    The arclength function is computed by adaptive quadrature of the speed
    and inverted to machine precision; curvature at the vertices is a/b^2
    and b/a^2.
    """
    from scipy.integrate import quad
    from scipy.optimize import brentq

    if a <= 0 or b <= 0:
        raise ValueError("semiaxes must be positive")
    if max(a / b, b / a) > 100:
        raise ValueError("aspect ratio > 100 not supported")

    def speed(th):
        return np.hypot(a * np.sin(th), b * np.cos(th))

    L = 4.0 * quad(speed, 0.0, np.pi / 2.0, epsabs=1e-13, epsrel=1e-13)[0]

    def arclen(th):
        k = int(th // (np.pi / 2.0))
        return k * L / 4.0 + quad(speed, k * np.pi / 2.0, th,
                                  epsabs=1e-13, epsrel=1e-13)[0]

    s_targets = np.linspace(0.0, L, n_modes, endpoint=False)
    thetas = np.empty(n_modes)
    th_lo = 0.0
    for i, st in enumerate(s_targets):
        if i == 0:
            thetas[i] = 0.0
            continue
        th_hi = th_lo + 2.0 * (st - arclen(th_lo)) / speed(th_lo) + 1e-9
        while arclen(th_hi) < st:
            th_hi += 0.1
        thetas[i] = brentq(lambda t: arclen(t) - st, th_lo, th_hi,
                           xtol=1e-14, rtol=1e-15)
        th_lo = thetas[i]
    z = a * np.cos(thetas) + 1j * b * np.sin(thetas)
    return BoundaryCurve(length=L, coeffs=np.fft.fft(z), side=side)


@dataclass(frozen=True)
class BoundaryField:
    """Magnetic field restricted to a boundary curve.

    ``b`` is the interior infimum (supplied by the caller), ``b_prime`` the
    boundary infimum computed from the samples.
    """

    curve: BoundaryCurve
    values: np.ndarray            # B(gamma(s_i)) on a uniform s-grid
    b: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v <= 0):
            raise ValueError("field must be positive on the boundary")
        if self.b <= 0:
            raise ValueError("interior infimum must be positive")
        object.__setattr__(self, "values", v)

    @staticmethod
    def constant(curve: BoundaryCurve, B: float,
                 n_samples: int = 256) -> "BoundaryField":
        return BoundaryField(curve=curve, values=np.full(n_samples, B), b=B)

    @property
    def b_prime(self) -> float:
        return float(self.values.min())

    def at(self, s) -> np.ndarray:
        """Field value at arclength s by trigonometric interpolation."""
        v = self.values
        n = v.size
        c = np.fft.rfft(v)
        k = np.arange(c.size)
        s = np.atleast_1d(np.asarray(s, dtype=float))
        phase = np.exp(2.0j * np.pi * np.outer(s / self.curve.length, k))
        out = (phase * c).real.sum(axis=1) * 2.0 / n
        out -= c[0].real / n
        if n % 2 == 0:
            out -= (phase[:, -1] * c[-1]).real / n
        return out

    def assumption_holds(self, theta0: float) -> bool:
        """The spectral assumption 0 < Theta0 * b' < b."""
        return 0.0 < theta0 * self.b_prime < self.b
