"""Constant-field model operators: half-cylinder, Dirichlet strip, curved family.

The half-cylinder operator (periodic in s, Neumann at t=0) separates into
Fourier modes and its counting function is an exact lattice count inside an
interval given by the inverse branches nu+/-.  The Dirichlet strip does not
separate and is counted by banded inertia of a 2D finite-difference matrix.
The curved one-dimensional family M(xi, alpha, L) carries the curvature
correction; summing its per-mode counts gives the curved half-cylinder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import de_gennes
from .band_eig import (BandedHermitian, SymTridiag, banded_inertia,
                       bisect_eigenvalues_batch, sturm_counts_batch)
from .de_gennes import InverseBranch

DIRICHLET_S = "dirichlet"
PERIODIC_S = "periodic"

# Grid policy: points per magnetic length sqrt(h/B) for 2D assemblies.
POINTS_PER_MAGNETIC_LENGTH = 10
MIN_POINTS_PER_MAGNETIC_LENGTH = 8


@dataclass(frozen=True)
class HalfCylinderSpec:
    S: float
    B: float
    h: float

    def __post_init__(self):
        if min(self.S, self.B, self.h) <= 0:
            raise ValueError("S, B, h must all be positive")


@dataclass(frozen=True)
class StripSpec:
    S: float
    T: float
    B: float
    h: float
    kappa: float = 0.0
    bc_s: str = DIRICHLET_S

    def __post_init__(self):
        if min(self.S, self.T, self.B, self.h) <= 0:
            raise ValueError("S, T, B, h must all be positive")
        if self.kappa != 0.0 and 2.0 * abs(self.kappa) * self.T > 1.0:
            raise ValueError("need 2|kappa| T <= 1")
        if self.bc_s not in (DIRICHLET_S, PERIODIC_S):
            raise ValueError("bc_s must be 'dirichlet' or 'periodic'")


@dataclass(frozen=True)
class CurvedModelSpec:
    """Parameters of the weighted 1D family M(xi, alpha, L)."""

    xi: float
    alpha: float
    L: float

    def __post_init__(self):
        if not -1.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [-1, 1]")
        if self.L < 1.0:
            raise ValueError("L must be >= 1")
        if 2.0 * abs(self.alpha) * self.L > 1.0:
            raise ValueError("need 2|alpha| L <= 1")


def _open_interval_lattice_count(a: float, b: float) -> int:
    """#(Z intersect (a, b)) for an open interval."""
    if b <= a:
        return 0
    lo = math.floor(a) + 1
    hi = math.ceil(b) - 1
    return max(0, hi - lo + 1)


def count_half_cylinder_exact(spec: HalfCylinderSpec, lam: float,
                              branches: tuple[InverseBranch, InverseBranch] | None = None
                              ) -> int:
    """Exact eigenvalue count of the half-cylinder operator below lam.

    Requires lam < h*B (at lam = h*B the count is infinite).  The count is
    the number of integers in the open interval scaled from (nu-, nu+) at
    beta = lam/(h*B); empty below the minimum of mu.
    """
    if lam >= spec.h * spec.B:
        raise ValueError("count is infinite for lam >= h*B")
    plus, minus = branches if branches is not None else de_gennes.default_branches()
    beta = lam / (spec.h * spec.B)
    if beta <= plus.theta0:
        return 0
    c = math.sqrt(spec.B) * spec.S / (2.0 * math.pi * math.sqrt(spec.h))
    xm = de_gennes.nu(minus, beta)
    xp = de_gennes.nu(plus, beta)
    return _open_interval_lattice_count(c * xm, c * xp)


def count_half_cylinder_oracle(spec: HalfCylinderSpec, lam: float,
                               pad: float = 1.0) -> int:
    """Half-cylinder count by separation of variables.

    Sums over Fourier modes n the indicator mu(2 pi n h^{1/2} B^{-1/2} / S)
    < lam/(h*B).  The n-window is taken from the inverse-branch bounds
    padded by ``pad`` in xi, which is certified by the monotonicity of mu
    away from its minimum.
    """
    if lam >= spec.h * spec.B:
        raise ValueError("count is infinite for lam >= h*B")
    plus, minus = de_gennes.default_branches()
    beta = lam / (spec.h * spec.B)
    if beta <= plus.theta0:
        return 0
    c = math.sqrt(spec.B) * spec.S / (2.0 * math.pi * math.sqrt(spec.h))
    xm = de_gennes.nu(minus, beta) - pad
    xp = de_gennes.nu(plus, beta) + pad
    n_lo = math.floor(c * xm)
    n_hi = math.ceil(c * xp)
    ns = np.arange(n_lo, n_hi + 1)
    xis = ns / c
    mus = de_gennes.mu_fast(xis)
    return int(np.count_nonzero(mus < beta))


def half_cylinder_estimate_gap(spec: HalfCylinderSpec, b0: float) -> float:
    """|h^{1/2} N(h b0) - (B^{1/2} S / 2 pi)(nu+ - nu-)(b0/B)|."""
    plus, minus = de_gennes.default_branches()
    n = count_half_cylinder_exact(spec, spec.h * b0)
    beta = b0 / spec.B
    width = de_gennes.nu(plus, beta) - de_gennes.nu(minus, beta)
    main = math.sqrt(spec.B) * spec.S / (2.0 * math.pi) * width
    return abs(math.sqrt(spec.h) * n - main)


def _strip_grid(spec: StripSpec, refine: int = 1) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Interior s-nodes and t-nodes for the strip discretization."""
    ell = math.sqrt(spec.h / spec.B)
    step = ell / (POINTS_PER_MAGNETIC_LENGTH * refine)
    n_s = int(math.ceil(spec.S / step))
    n_t = int(math.ceil(spec.T / step))
    ds = spec.S / n_s
    dt = spec.T / n_t
    if min(ell / ds, ell / dt) < MIN_POINTS_PER_MAGNETIC_LENGTH:
        raise ValueError("grid too coarse for the magnetic length")
    s = ds * np.arange(1, n_s)          # Dirichlet at s=0 and s=S
    t = dt * np.arange(0, n_t)          # Neumann at t=0, Dirichlet at t=T
    return s, t, ds, dt


def assemble_strip(spec: StripSpec, refine: int = 1) -> BandedHermitian:
    """Banded Hermitian FD matrix of the (possibly curved) Dirichlet strip.

    kappa = 0: the plain operator (h D_s + B t)^2 + (h D_t)^2.  kappa != 0:
    the weighted form with weight a(t) = 1 - kappa t and momentum term
    a^{-2} (h D_s + t - kappa t^2 / 2)^2, discretized in weighted form and
    symmetrized by the diagonal similarity D = diag(weight^{1/2}).
    Ordering is t-fastest, so the half-bandwidth equals n_t (the s-coupling
    distance); s-couplings are complex, t-couplings real.
    """
    if spec.bc_s != DIRICHLET_S:
        raise ValueError("banded assembly requires Dirichlet conditions in s")
    s, t, ds, dt = _strip_grid(spec, refine)
    h, B, kap = spec.h, spec.B, spec.kappa
    n_s, n_t = s.size, t.size
    n = n_s * n_t

    if kap == 0.0:
        a = np.ones(n_t)
        a_half = np.ones(n_t)           # a at t_{i+1/2}
        p = B * t                       # momentum shift in (h D_s + p)^2
    else:
        a = 1.0 - kap * t
        a_half = 1.0 - kap * (t + 0.5 * dt)
        p = t - 0.5 * kap * t**2

    # weighted inner product: w_i = a(t_i) dt ds with the trapezoid half
    # weight at the natural (Neumann) boundary node t=0; the form matrix is
    # symmetrized against it, M -> W^{-1/2} F W^{-1/2}.
    w = a.copy()
    w[0] *= 0.5
    sqw = np.sqrt(w)

    # t-part of the form: sum a_{i+1/2} |u_{i+1}-u_i|^2 / dt^2, zero flux at
    # t=0 (natural condition), Dirichlet at t=T.
    diag_t = np.empty(n_t)
    diag_t[1:] = (a_half[1:] + a_half[:-1]) / (a[1:] * dt**2)
    diag_t[0] = a_half[0] / (w[0] * dt**2)
    diag_t *= h**2
    off_t_sym = -h**2 * a_half[:-1] / (dt**2 * sqw[:-1] * sqw[1:])

    # s-part: a^{-2} [(h D_s)^2 + 2 p h D_s + p^2] with central differences
    diag_s = (2.0 * h**2 / ds**2 + p**2) / a**2
    # lower-band entry A[(j+1,i),(j,i)]; upper entry is its conjugate
    coup_s = (-h**2 / ds**2 + 1j * h * p / ds) / a**2

    bands = np.zeros((n_t + 1, n), dtype=complex)
    bands[0, :] = np.tile(diag_t + diag_s, n_s)
    # t-coupling (distance 1), absent across s-columns
    col_t = np.tile(np.concatenate((off_t_sym, [0.0])), n_s)[: n - 1]
    bands[1, : n - 1] = col_t
    # s-coupling (distance n_t); weights cancel since w depends on t only
    bands[n_t, : n - n_t] = np.tile(coup_s, n_s)[: n - n_t]
    return BandedHermitian(n=n, half_bandwidth=n_t, bands=bands)


def count_strip(spec: StripSpec, lam: float, refine: int = 1) -> int:
    """Eigenvalue count of the strip/cylinder operator below lam.

    Dirichlet in s: banded inertia of the assembled matrix.  Periodic in s:
    exact lattice count (kappa = 0) or per-mode curved count (kappa != 0).
    """
    if spec.bc_s == PERIODIC_S:
        if spec.kappa == 0.0:
            return count_half_cylinder_exact(
                HalfCylinderSpec(S=spec.S, B=spec.B, h=spec.h), lam)
        return count_curved_cylinder(spec, lam)
    A = assemble_strip(spec, refine)
    return banded_inertia(A, lam).n_neg


def curved_model_tridiags(xis: np.ndarray, alpha: float, L: float,
                          n: int) -> tuple[np.ndarray, np.ndarray]:
    """Symmetrized tridiagonal FD matrices of M(xi, alpha, L), per column.

    Natural (weighted Neumann) condition at tau=0 through the weighted
    ghost point, Dirichlet at tau=L.  Weight a(tau) = 1 - alpha tau.
    """
    dt = L / n
    tau = dt * np.arange(0, n)       # Dirichlet at tau = L drops node n
    a = 1.0 - alpha * tau
    a_half = 1.0 - alpha * (tau + 0.5 * dt)
    w = a.copy()
    w[0] *= 0.5
    sqw = np.sqrt(w)
    diag_t = np.empty(n)
    diag_t[1:] = (a_half[1:] + a_half[:-1]) / (a[1:] * dt**2)
    diag_t[0] = a_half[0] / (w[0] * dt**2)
    q = tau[:, None] - 0.5 * alpha * tau[:, None] ** 2 + xis[None, :]
    diags = diag_t[:, None] + np.square(q) / (a**2)[:, None]
    off = -a_half[:-1] / (dt**2 * sqw[:-1] * sqw[1:])
    return diags, off


def _curved_grid_size(L: float) -> int:
    return max(2000, int(40 * L))


def curved_model_eig(spec: CurvedModelSpec, j: int = 0,
                     n_grid: int | None = None) -> float:
    """j-th eigenvalue of M(xi, alpha, L)."""
    n = n_grid if n_grid is not None else _curved_grid_size(spec.L)
    diags, off = curved_model_tridiags(np.array([spec.xi]), spec.alpha,
                                       spec.L, n)
    lo = np.zeros(1)
    hi = np.full(1, spec.xi**2 + 6.0 * abs(spec.xi) + 12.0)
    return float(bisect_eigenvalues_batch(diags, off, np.array([j]),
                                          tol=1e-11, lo=lo, hi=hi)[0])


def curved_model_eigs_batch(xis: np.ndarray, alpha: float, L: float,
                            j: int = 0, n_grid: int | None = None) -> np.ndarray:
    """First (or second) eigenvalues of M(xi_i, alpha, L) for many xi."""
    n = n_grid if n_grid is not None else _curved_grid_size(L)
    xis = np.asarray(xis, dtype=float)
    diags, off = curved_model_tridiags(xis, alpha, L, n)
    m = xis.size
    hi = np.square(xis) + 6.0 * np.abs(xis) + 12.0
    return bisect_eigenvalues_batch(diags, off, np.full(m, j), tol=1e-11,
                                    lo=np.zeros(m), hi=hi)


def count_curved_cylinder(spec: StripSpec, lam: float,
                          max_widen: int = 3) -> int:
    """Count of the curved half-cylinder below lam by mode decomposition.

    The operator decomposes into h * M(2 pi n h^{1/2}/S, h^{1/2} kappa,
    h^{-1/2} T) over Fourier modes n; per-mode counts are Sturm counts at
    lam/h.  The mode window around xi0 is derived from the quadratic model
    of the first eigenvalue and certified by rechecking that the counts
    vanish at the window edges; the window is widened on failure, erroring
    after ``max_widen`` retries.
    """
    if spec.B != 1.0:
        raise ValueError("the curved model is stated for unit field; "
                         "rescale h -> h/B first")
    consts = de_gennes.default_constants()
    h, S = spec.h, spec.S
    sq = math.sqrt(h)
    alpha = sq * spec.kappa
    L = spec.T / sq
    CurvedModelSpec(xi=0.0, alpha=alpha, L=max(L, 1.0))  # validate constraints
    target = lam / h
    c1, xi0 = consts.c1, consts.xi0
    # quadratic model: mu1 ~ Theta0 + 3 C1 |xi0| (xi-xi0)^2 - C1 alpha
    slack = target - consts.theta0 + c1 * abs(alpha)
    margin = 0.02 + 6.0 * alpha**2 + 0.05 * abs(alpha)
    width = math.sqrt(max(slack, 0.0) / (3.0 * c1 * abs(xi0))) + \
        math.sqrt(margin / (3.0 * c1 * abs(xi0)))
    dxi = 2.0 * math.pi * sq / S
    n0 = xi0 / dxi
    n_half = int(math.ceil(width / dxi)) + 3
    ngrid = _curved_grid_size(L)
    for attempt in range(max_widen + 1):
        ns = np.arange(math.floor(n0) - n_half, math.ceil(n0) + n_half + 1)
        xis = ns * dxi
        diags, off = curved_model_tridiags(xis, alpha, L, ngrid)
        counts = sturm_counts_batch(diags, off, np.full(xis.size, target))
        if counts[0] == 0 and counts[-1] == 0:
            return int(counts.sum())
        n_half = int(1.5 * n_half) + 2
    raise ArithmeticError("mode window certification failed after retries")
