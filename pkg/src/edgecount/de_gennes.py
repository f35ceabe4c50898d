"""The half-line model ODE family and its spectral constants.

mu(xi) is the lowest Neumann eigenvalue of -d^2/dt^2 + (xi+t)^2 on the
half-line; mu1 is the second eigenvalue and lambda the Dirichlet ground
state.  The module computes the minimum Theta0 = mu(xi0) = xi0^2, the
curvature constant C1 = mu''(xi0)/(6|xi0|), Theta1 = inf mu1, and the two
monotone inverse branches nu+/- of mu (extended by xi0 below Theta0).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .band_eig import SymTridiag, bisect_eigenvalue, bisect_eigenvalues_batch

NEUMANN = "neumann"
DIRICHLET = "dirichlet"

DEFAULT_N_GRID = 2000
# Potential at the truncation end must exceed the targeted eigenvalue by
# this margin; validated at evaluation time.
TRUNC_MARGIN = 50.0


@dataclass(frozen=True)
class HalfLineDisc:
    """Finite-difference discretization policy for the half-line operator."""

    xi: float
    bc_origin: str = NEUMANN
    trunc_length: float = 0.0   # 0 -> automatic max(12, |xi| + 10)
    n_grid: int = DEFAULT_N_GRID

    def __post_init__(self):
        if self.bc_origin not in (NEUMANN, DIRICHLET):
            raise ValueError("bc_origin must be 'neumann' or 'dirichlet'")
        if self.n_grid < 16:
            raise ValueError("n_grid must be >= 16")
        if self.trunc_length == 0.0:
            object.__setattr__(self, "trunc_length",
                               max(12.0, abs(self.xi) + 10.0))
        if self.trunc_length <= 0:
            raise ValueError("trunc_length must be positive")


def _halfline_tridiags(xis: np.ndarray, bc: str, L: float,
                       n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tridiagonal FD matrices of -d^2/dt^2 + (xi+t)^2, one column per xi.

    Neumann at the origin uses a mirrored ghost point (second order), which
    halves the first off-diagonal weight after symmetrization; Dirichlet
    eliminates the boundary row.  Dirichlet at the truncation end always.
    Returns (diags, offdiag, grid).
    """
    h = L / n
    if bc == NEUMANN:
        # nodes t_0=0 .. t_{n-1}; ghost mirror at -h gives row
        # (2u_0 - 2u_1)/h^2; symmetrized by scaling u_0 by sqrt(1/2),
        # equivalent to cell weight 1/2 at the boundary node.
        t = h * np.arange(n)
        off = np.full(n - 1, -1.0 / h**2)
        off[0] = -np.sqrt(2.0) / h**2
        diags = 2.0 / h**2 + np.square(xis[None, :] + t[:, None])
    else:
        # nodes t_1 .. t_{n-1}, u_0 = 0 eliminated
        t = h * np.arange(1, n)
        off = np.full(n - 2, -1.0 / h**2)
        diags = 2.0 / h**2 + np.square(xis[None, :] + t[:, None])
    return diags, off, t


def mu_batch(xis, j: int = 0, bc: str = NEUMANN,
             n_grid: int = DEFAULT_N_GRID, trunc_length: float | None = None,
             richardson: bool = True, tol: float = 1e-12) -> np.ndarray:
    """Eigenvalue j of the half-line operator for each xi, vectorized.

    One Richardson step (h^2 scheme) combines the n_grid and 2*n_grid
    results.  Raises if the truncation margin is violated for any xi.
    """
    xis = np.atleast_1d(np.asarray(xis, dtype=float))
    if j not in (0, 1):
        raise ValueError("only the first two eigenvalues are supported")
    L = trunc_length if trunc_length is not None else \
        max(12.0, np.abs(xis).max() + 10.0)
    ks = np.full(xis.size, j)

    # crude but safe upper bound on the first two eigenvalues
    lo = np.zeros(xis.size)
    hi = np.square(xis) + 6.0 * np.abs(xis) + 10.0

    def solve(n):
        diags, off, _ = _halfline_tridiags(xis, bc, L, n)
        return bisect_eigenvalues_batch(diags, off, ks, tol=tol, lo=lo, hi=hi)

    e1 = solve(n_grid)
    vals = (4.0 * solve(2 * n_grid) - e1) / 3.0 if richardson else e1
    vmin = np.square(xis + L)
    if np.any(vmin < vals + TRUNC_MARGIN):
        raise ValueError(
            f"truncation length {L} too small: potential at the end must "
            f"exceed the eigenvalue by {TRUNC_MARGIN}")
    return vals


@lru_cache(maxsize=4096)
def _mu_cached(xi: float, j: int, bc: str, n_grid: int, L: float | None) -> float:
    return float(mu_batch(np.array([xi]), j=j, bc=bc, n_grid=n_grid,
                          trunc_length=L)[0])


def mu(disc: HalfLineDisc | float, j: int = 0) -> float:
    """Eigenvalue j (0 or 1) of the half-line operator.

    Accepts either a HalfLineDisc or a bare xi (Neumann, default policy).
    """
    if isinstance(disc, HalfLineDisc):
        return _mu_cached(disc.xi, j, disc.bc_origin, disc.n_grid,
                          disc.trunc_length)
    return _mu_cached(float(disc), j, NEUMANN, DEFAULT_N_GRID, None)


@dataclass(frozen=True)
class DeGennesConstants:
    theta0: float
    xi0: float
    c1: float
    theta1: float
    mu2_xi0: float          # second derivative of mu at xi0
    err: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0.0 < self.theta0 < 1.0):
            raise ValueError("theta0 must lie in (0, 1)")
        if not (-1.0 < self.xi0 < 0.0):
            raise ValueError("xi0 must lie in (-1, 0)")
        if self.c1 <= 0:
            raise ValueError("c1 must be positive")
        if self.theta1 <= 1.0:
            raise ValueError("theta1 must exceed 1")

    def to_json(self) -> str:
        return json.dumps({
            "theta0": self.theta0, "xi0": self.xi0, "c1": self.c1,
            "theta1": self.theta1, "mu2_xi0": self.mu2_xi0, "err": self.err,
        }, indent=2)

    @staticmethod
    def from_json(s: str) -> "DeGennesConstants":
        d = json.loads(s)
        return DeGennesConstants(theta0=d["theta0"], xi0=d["xi0"],
                                 c1=d["c1"], theta1=d["theta1"],
                                 mu2_xi0=d["mu2_xi0"], err=d.get("err", {}))


def _minimize_on_grid(f_batch, lo: float, hi: float, xtol: float,
                      n_pts: int = 33) -> tuple[float, float]:
    """Minimize a smooth unimodal function by iterated grid refinement.

    Each stage evaluates f on a uniform grid in one vectorized call and
    shrinks the bracket around the minimizer.  Returns (xmin, fmin).
    """
    while True:
        xs = np.linspace(lo, hi, n_pts)
        fs = f_batch(xs)
        i = int(np.argmin(fs))
        if hi - lo < xtol:
            return float(xs[i]), float(fs[i])
        lo = xs[max(i - 1, 0)]
        hi = xs[min(i + 1, n_pts - 1)]


def find_constants(n_grid: int = DEFAULT_N_GRID,
                   refine: int = 1) -> DeGennesConstants:
    """Compute Theta0, xi0, C1 and Theta1 with error estimates.

    xi0 by grid-refinement minimization of mu on the bracket (-1, 0);
    mu''(xi0) by central second differences with a step-halving consistency
    check; C1 = mu''(xi0)/(6 |xi0|); Theta1 = inf mu1 by the same
    minimization.  ``refine`` scales the grid resolution.
    """
    ng = n_grid * max(1, refine)

    def mu0(xs):
        return mu_batch(xs, j=0, n_grid=ng)

    xi0, theta0 = _minimize_on_grid(mu0, -1.0, 0.0, xtol=2e-6)
    # quadratic refinement of the minimizer from three nearby samples
    d = 1e-3
    f = mu_batch(np.array([xi0 - d, xi0, xi0 + d]), n_grid=ng)
    corr = 0.5 * d * (f[0] - f[2]) / (f[0] - 2.0 * f[1] + f[2])
    xi0 = float(xi0 + corr)
    theta0 = float(mu_batch(np.array([xi0]), n_grid=ng)[0])

    # second derivative with step halving
    mu2 = []
    steps = [0.04, 0.02, 0.01]
    pts = np.array([xi0 + s * k for s in steps for k in (-1.0, 1.0)])
    vals = mu_batch(pts, n_grid=ng)
    for i, s in enumerate(steps):
        mu2.append((vals[2 * i] - 2.0 * theta0 + vals[2 * i + 1]) / s**2)
    # one Richardson step in the difference step (h^2 error)
    mu2_extrap = (4.0 * mu2[2] - mu2[1]) / 3.0
    mu2_check = (4.0 * mu2[1] - mu2[0]) / 3.0
    mu2_err = abs(mu2_extrap - mu2_check)
    if mu2_err > 1e-3:
        raise ArithmeticError(
            f"second difference of mu not stabilizing (spread {mu2_err:g})")
    c1 = mu2_extrap / (6.0 * abs(xi0))

    def mu1(xs):
        return mu_batch(xs, j=1, n_grid=ng)

    xi1, theta1 = _minimize_on_grid(mu1, -3.0, 0.5, xtol=1e-4)

    grid_err = 10.0 / ng**2   # conservative post-Richardson estimate
    return DeGennesConstants(
        theta0=theta0, xi0=xi0, c1=float(c1), theta1=theta1,
        mu2_xi0=float(mu2_extrap),
        err={"theta0": grid_err, "xi0": 1e-5, "theta1": 1e-4 + grid_err,
             "c1": float(mu2_err / (6.0 * abs(xi0)) + 1e-6),
             "mu2_xi0": float(mu2_err)})


PLUS = "plus"
MINUS = "minus"


@dataclass(frozen=True)
class InverseBranch:
    """Monotone sampled inverse branch of mu with the xi0-extension.

    ``betas`` are strictly monotone increasing mu-values; ``xis`` the
    matching arguments (increasing for the plus branch, decreasing for the
    minus branch).  Below theta0 both branches return xi0.
    """

    branch: str
    theta0: float
    xi0: float
    betas: np.ndarray
    xis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.betas, dtype=float)
        x = np.asarray(self.xis, dtype=float)
        if self.branch not in (PLUS, MINUS):
            raise ValueError("branch must be 'plus' or 'minus'")
        if b.shape != x.shape or b.ndim != 1 or b.size < 2:
            raise ValueError("need matching 1d sample tables")
        if np.any(np.diff(b) <= 0):
            raise ValueError("beta samples must be strictly increasing")
        dx = np.diff(x)
        if self.branch == PLUS and np.any(dx <= 0):
            raise ValueError("plus branch must be increasing in beta")
        if self.branch == MINUS and np.any(dx >= 0):
            raise ValueError("minus branch must be decreasing in beta")
        object.__setattr__(self, "betas", b)
        object.__setattr__(self, "xis", x)

    @property
    def beta_max(self) -> float:
        return float(self.betas[-1])

    def __call__(self, beta) -> np.ndarray | float:
        return nu(self, beta)

    def to_dict(self) -> dict:
        return {"branch": self.branch, "theta0": self.theta0,
                "xi0": self.xi0, "betas": self.betas.tolist(),
                "xis": self.xis.tolist()}

    @staticmethod
    def from_dict(d: dict) -> "InverseBranch":
        return InverseBranch(branch=d["branch"], theta0=d["theta0"],
                             xi0=d["xi0"], betas=np.array(d["betas"]),
                             xis=np.array(d["xis"]))


def nu(branch_table: InverseBranch, beta, polish: bool = True):
    """Evaluate the inverse branch; xi0 on [0, theta0) by the extension.

    Monotone inversion of mu: a monotone cubic (PCHIP) through the sample
    table gives the starting point; with ``polish`` the result is refined
    by secant iteration against the finite-difference mu solver, so the
    round trip through mu closes at solver accuracy.  The minus branch is
    only defined for beta < 1.
    """
    from scipy.interpolate import PchipInterpolator

    b = np.asarray(beta, dtype=float)
    scalar = b.ndim == 0
    b = np.atleast_1d(b).copy()
    if np.any(b < 0):
        raise ValueError("beta must be nonnegative")
    if branch_table.branch == MINUS and np.any(b >= 1.0):
        raise ValueError("nu_minus is only defined on [0, 1)")
    if np.any(b > branch_table.beta_max):
        raise ValueError(
            f"branch table covers beta <= {branch_table.beta_max:g}")
    interp = PchipInterpolator(branch_table.betas, branch_table.xis,
                               extrapolate=False)
    out = np.full(b.shape, branch_table.xi0)
    inside = b >= branch_table.theta0
    bq = np.clip(b[inside], branch_table.betas[0], None)
    out[inside] = interp(bq)
    if polish and np.any(inside):
        direction = 1.0 if branch_table.branch == PLUS else -1.0
        out[inside] = _secant_invert_mu(out[inside], b[inside], direction)
    return float(out[0]) if scalar else out


def _secant_invert_mu(xi_start: np.ndarray, betas: np.ndarray,
                      direction: float, max_iter: int = 10,
                      xtol: float = 1e-9) -> np.ndarray:
    """Refine mu(xi) = beta by lockstep secant iteration on the solver."""
    x0 = xi_start
    x1 = xi_start + direction * 1e-4   # stay on the monotone side of xi0
    f0 = mu_batch(x0, tol=1e-13) - betas
    f1 = mu_batch(x1, tol=1e-13) - betas
    for _ in range(max_iter):
        df = f1 - f0
        safe = np.abs(df) > 1e-15
        step = np.where(safe, f1 * (x1 - x0) / np.where(safe, df, 1.0), 0.0)
        x0, f0 = x1, f1
        x1 = x1 - step
        if np.all(np.abs(step) < xtol):
            break
        f1 = mu_batch(x1, tol=1e-13) - betas
    return x1


_MU_TABLE: dict = {}


def mu_fast(xis) -> np.ndarray:
    """mu(xi) from a dense precomputed cubic-spline table of the solver.

    Built lazily on [-6, 4] from the same finite-difference solver as
    ``mu``; accuracy ~1e-8.  Intended for mode scans where per-point solver
    calls would dominate the runtime.
    """
    from scipy.interpolate import CubicSpline

    if "spline" not in _MU_TABLE:
        grid = np.concatenate((
            np.linspace(-6.0, -2.0, 120, endpoint=False),
            np.linspace(-2.0, 0.5, 400, endpoint=False),
            np.linspace(0.5, 4.0, 240),
        ))
        vals = mu_batch(grid)
        _MU_TABLE["spline"] = CubicSpline(grid, vals)
    xis = np.atleast_1d(np.asarray(xis, dtype=float))
    out = np.empty(xis.shape)
    inside = (xis >= -6.0) & (xis <= 4.0)
    out[inside] = _MU_TABLE["spline"](xis[inside])
    if np.any(~inside):
        out[~inside] = mu_batch(xis[~inside])
    return out


def build_branch_tables(constants: DeGennesConstants,
                        beta_max: float = 4.0,
                        n_grid: int = DEFAULT_N_GRID,
                        n_samples: int = 240) -> tuple[InverseBranch, InverseBranch]:
    """Sample mu along both monotone branches and package the inverses.

    The plus branch is sampled on xi in [xi0, xi_hi] with mu(xi_hi) >=
    beta_max; the minus branch on [xi_lo, xi0] down to mu ~ 1 - 1e-4.
    Sampling is quadratic-graded near xi0 where mu is flat.
    """
    xi0, th0 = constants.xi0, constants.theta0

    def sample(xi_far: float) -> tuple[np.ndarray, np.ndarray]:
        u = np.linspace(0.0, 1.0, n_samples)[1:]     # exclude xi0 itself
        xis = xi0 + (xi_far - xi0) * u**2
        vals = mu_batch(xis, n_grid=n_grid)
        return xis, vals

    # plus branch: mu grows like (xi)^2 + O(1), bracket generously
    xi_hi = np.sqrt(beta_max) + 1.0
    xis_p, mus_p = sample(xi_hi)
    keep = np.concatenate(([True], np.diff(mus_p) > 0))
    xis_p, mus_p = xis_p[keep], mus_p[keep]
    betas_p = np.concatenate(([th0], mus_p))
    xs_p = np.concatenate(([xi0], xis_p))

    # minus branch: mu -> 1 superexponentially fast as xi -> -inf
    xi_lo = -4.5
    xis_m, mus_m = sample(xi_lo)
    keep = np.concatenate(([True], np.diff(mus_m) > 0))
    xis_m, mus_m = xis_m[keep], mus_m[keep]
    betas_m = np.concatenate(([th0], mus_m))
    xs_m = np.concatenate(([xi0], xis_m))

    plus = InverseBranch(branch=PLUS, theta0=th0, xi0=xi0,
                         betas=betas_p, xis=xs_p)
    minus = InverseBranch(branch=MINUS, theta0=th0, xi0=xi0,
                          betas=betas_m, xis=xs_m)
    return plus, minus


_DEFAULT: dict = {}


def default_constants() -> DeGennesConstants:
    """Process-wide lazily computed constants (immutable, shared read-only)."""
    if "constants" not in _DEFAULT:
        _DEFAULT["constants"] = find_constants()
    return _DEFAULT["constants"]


def default_branches() -> tuple[InverseBranch, InverseBranch]:
    if "branches" not in _DEFAULT:
        _DEFAULT["branches"] = build_branch_tables(default_constants())
    return _DEFAULT["branches"]
