"""Exact counting for the full 2D Neumann problem on radial domains.

On a disk (or the exterior of a disk) with a radial field, the magnetic
Neumann operator splits over angular momenta m into radial Sturm problems

    -h^2 (1/r) d/dr (r d/dr) + (h m / r - A(r))^2,   A(r) = (1/r) int_0^r B rho drho,

each discretized as a symmetric tridiagonal matrix.  The total count below
a cutoff is the sum of per-mode Sturm counts over a certified mode window,
which serves as an independent check on the asymptotic predictions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .band_eig import SymTridiag, sturm_counts_batch
from .de_gennes import DeGennesConstants, default_constants
from .geometry import EXTERIOR, INTERIOR, BoundaryField, circle
from .weyl_law import EdgePrediction, curvature_term, edge_weyl_term

POINTS_PER_MAGNETIC_LENGTH = 10.0
MIN_POINTS_PER_MAGNETIC_LENGTH = 8.0
WINDOW_PAD = 10
MAX_WIDEN = 3
MODE_CHUNK = 512
# exterior truncation: edge states decay on the magnetic length scale
R_OUT_LENGTHS = 12.0
R_OUT_MIN_DEPTH = 0.5


@dataclass(frozen=True)
class RadialProblem:
    """Rotationally symmetric Neumann problem at semiclassical parameter h.

    ``side`` is the disk interior or the exterior of the disk of radius R;
    ``B`` is the constant field strength, or pass ``field`` as a radial
    profile B(r) (then ``B`` is ignored for the vector potential).  The
    grid step is the magnetic length sqrt(h/B) divided by
    ``points_per_length``; exterior problems are truncated at ``r_out``
    with a Dirichlet condition.
    """

    side: str
    R: float
    h: float
    B: float = 1.0
    field: object = None        # optional callable radial profile B(r)
    R_out: float | None = None
    points_per_length: float = POINTS_PER_MAGNETIC_LENGTH

    def __post_init__(self):
        if self.side not in (INTERIOR, EXTERIOR):
            raise ValueError("side must be 'interior' or 'exterior'")
        if self.R <= 0 or self.h <= 0 or self.B <= 0:
            raise ValueError("R, h and B must be positive")
        if self.points_per_length < MIN_POINTS_PER_MAGNETIC_LENGTH:
            raise ValueError(
                f"grid coarser than {MIN_POINTS_PER_MAGNETIC_LENGTH} points "
                "per magnetic length")
        if self.side == EXTERIOR and self.R_out is not None \
                and self.R_out <= self.R:
            raise ValueError("R_out must exceed R")

    @property
    def magnetic_length(self) -> float:
        return math.sqrt(self.h / self.B)

    @property
    def r_out(self) -> float:
        """Exterior truncation radius (defaulted from the decay scale)."""
        if self.side == INTERIOR:
            raise ValueError("r_out is only defined for exterior problems")
        if self.R_out is not None:
            return self.R_out
        return self.R + max(R_OUT_LENGTHS * self.magnetic_length,
                            R_OUT_MIN_DEPTH)

    def radii(self) -> tuple[np.ndarray, float]:
        """Cell-centered radial nodes and the grid step.

        Cells tile (r_in, r_max); node i sits at the cell center, so the
        first interior node is at dr/2 (the r=0 face carries zero weight,
        which encodes both the m=0 reflection condition and the m != 0
        regularity) and the Neumann face falls exactly on r=R.
        """
        r_in = 0.0 if self.side == INTERIOR else self.R
        r_max = self.R if self.side == INTERIOR else self.r_out
        dr = self.magnetic_length / self.points_per_length
        n = max(4, int(round((r_max - r_in) / dr)))
        dr = (r_max - r_in) / n
        return r_in + (np.arange(n) + 0.5) * dr, dr

    def a_theta(self, r: np.ndarray) -> np.ndarray:
        """Angular vector potential A(r) = (1/r) int_0^r B(rho) rho drho.

        The integral always starts at rho = 0, so exterior problems carry
        the whole-plane flux B*pi*R^2 through the obstacle.
        """
        r = np.asarray(r, dtype=float)
        if self.field is None:
            return 0.5 * self.B * r
        from scipy.integrate import cumulative_trapezoid
        fine = np.linspace(0.0, float(r.max()), 8192)
        acc = cumulative_trapezoid(self.field(fine) * fine, fine, initial=0.0)
        return np.interp(r, fine, acc) / np.where(r > 0, r, 1.0)

    def boundary_field(self, n_samples: int = 256) -> BoundaryField:
        curve = circle(self.R, side=self.side)
        if self.field is None:
            return BoundaryField.constant(curve, self.B, n_samples)
        BR = float(self.field(np.array([self.R]))[0])
        return BoundaryField(curve=curve, values=np.full(n_samples, BR),
                             b=BR)


@dataclass(frozen=True)
class CountReport:
    """Counting result N(lambda) with its mode decomposition."""

    lam: float
    total: int
    per_mode: dict
    window: tuple[int, int]
    certified: bool
    prediction: float = float("nan")
    rel_err: float = float("nan")

    def __post_init__(self):
        if self.total != sum(self.per_mode.values()):
            raise ValueError("total must equal the sum of per-mode counts")


def _kinetic_parts(p: RadialProblem) -> tuple[np.ndarray, np.ndarray,
                                              np.ndarray, float]:
    """Shared m-independent pieces: kinetic diag, offdiag, radii, step.

    Finite-volume flux form on the r dr inner product, symmetrized by the
    diagonal weight sqrt(r_i): off_i = -h^2 r_{i+1/2} / (dr^2 sqrt(r_i r_{i+1})).
    The flux through the inner face (r=0 or the Neumann face at r=R) and
    through the interior Neumann face is omitted; the outer Dirichlet face
    (exterior truncation) reflects the ghost value, doubling the face term.
    """
    r, dr = p.radii()
    h2 = p.h * p.h
    face_lo = r - 0.5 * dr
    face_hi = r + 0.5 * dr
    diag = h2 * (face_lo + face_hi) / (r * dr * dr)
    if p.side == INTERIOR:
        # Neumann at r=R: drop the outer face flux (r=0 face has zero weight)
        diag[-1] -= h2 * face_hi[-1] / (r[-1] * dr * dr)
    else:
        # Neumann at r=R (inner face); Dirichlet ghost doubles the outer face
        diag[0] -= h2 * face_lo[0] / (r[0] * dr * dr)
        diag[-1] += h2 * face_hi[-1] / (r[-1] * dr * dr)
    off = -h2 * face_hi[:-1] / (dr * dr * np.sqrt(r[:-1] * r[1:]))
    return diag, off, r, dr


def sector_operator(p: RadialProblem, m: int,
                    outer_bc: str | None = None) -> SymTridiag:
    """Radial tridiagonal operator on the angular sector e^{i m theta}.

    ``outer_bc`` overrides the outer-face condition ("neumann" or
    "dirichlet"); the default is Neumann at r=R for the interior and
    Dirichlet at the truncation radius for the exterior.  Used with a
    large interior R and a Dirichlet override this reproduces the
    whole-plane Landau levels.
    """
    diag, off, r, dr = _kinetic_parts(p)
    diag = diag.copy()
    if outer_bc is not None:
        h2 = p.h * p.h
        face = (r[-1] + 0.5 * dr)
        default_neumann = p.side == INTERIOR
        if outer_bc == "dirichlet" and default_neumann:
            diag[-1] += 2.0 * h2 * face / (r[-1] * dr * dr)
        elif outer_bc == "neumann" and not default_neumann:
            diag[-1] -= 2.0 * h2 * face / (r[-1] * dr * dr)
        elif outer_bc not in ("neumann", "dirichlet"):
            raise ValueError("outer_bc must be 'neumann' or 'dirichlet'")
    diag = diag + (p.h * m / r - p.a_theta(r)) ** 2
    return SymTridiag(diag=diag, offdiag=off)


def _mode_window(p: RadialProblem, lam: float,
                 pad: int) -> tuple[int, int, np.ndarray, np.ndarray]:
    """Classically allowed angular momenta for energy lam, padded.

    V_m(r) = (h m / r - A(r))^2 dips below lam iff m lies in
    [(A - sqrt(lam)) r / h, (A + sqrt(lam)) r / h] for some grid radius r,
    so the allowed window is the range of those interval endpoints.
    """
    r, _ = p.radii()
    A = p.a_theta(r)
    s = math.sqrt(max(lam, 0.0))
    m_lo = int(math.floor(((A - s) * r).min() / p.h)) - pad
    m_hi = int(math.ceil(((A + s) * r).max() / p.h)) + pad
    return m_lo, m_hi, r, A


def _counts_over_modes(p: RadialProblem, lam: float, m_lo: int,
                       m_hi: int) -> np.ndarray:
    """Sturm counts below lam for each mode in [m_lo, m_hi], chunked."""
    diag0, off, r, _ = _kinetic_parts(p)
    ms = np.arange(m_lo, m_hi + 1)
    A = p.a_theta(r)
    counts = np.empty(ms.size, dtype=np.int64)
    for a in range(0, ms.size, MODE_CHUNK):
        chunk = ms[a:a + MODE_CHUNK]
        diags = diag0[:, None] + (p.h * chunk[None, :] / r[:, None]
                                  - A[:, None]) ** 2
        offs = np.repeat(off[:, None], chunk.size, axis=1)
        lams = np.full(chunk.size, lam)
        counts[a:a + MODE_CHUNK] = sturm_counts_batch(diags, offs, lams)
    return counts


def count_edge_states(p: RadialProblem, lam: float, pad: int = WINDOW_PAD,
                      max_widen: int = MAX_WIDEN,
                      _validate_truncation: bool = True) -> CountReport:
    """Total eigenvalue count below lam with a certified mode window.

    The window starts from the classically allowed momenta, padded; it is
    certified once the counts vanish on the pad at both ends, and widened
    otherwise.  Exterior runs are repeated with the truncation depth
    doubled and must reproduce the same total.
    """
    b_inf = p.B if p.field is None else float(np.min(p.field(p.radii()[0])))
    if not lam < p.h * b_inf:
        raise ValueError("lambda must lie below h * inf B (discrete regime)")
    m_lo, m_hi, _, _ = _mode_window(p, lam, pad)
    for attempt in range(max_widen + 1):
        counts = _counts_over_modes(p, lam, m_lo, m_hi)
        edge = min(pad, counts.size)
        if counts[:edge].sum() == 0 and counts[-edge:].sum() == 0:
            break
        if attempt == max_widen:
            raise ArithmeticError("mode window failed to certify")
        m_lo -= 2 * pad
        m_hi += 2 * pad
    ms = np.arange(m_lo, m_hi + 1)
    total = int(counts.sum())
    if p.side == EXTERIOR and _validate_truncation:
        deep = replace(p, R_out=p.R + 2.0 * (p.r_out - p.R))
        check = count_edge_states(deep, lam, pad, max_widen,
                                  _validate_truncation=False)
        if check.total != total:
            raise ArithmeticError(
                "exterior truncation unstable: count changed from "
                f"{total} to {check.total} when doubling the depth")
    per_mode = {int(m): int(c) for m, c in zip(ms, counts) if c}
    return CountReport(lam=lam, total=total, per_mode=per_mode,
                       window=(m_lo, m_hi), certified=True)


def convergence_study(p: RadialProblem, b0: float, h_list,
                      prediction: EdgePrediction | None = None) -> list[dict]:
    """Sweep h at cutoff h*b0 and compare h^{1/2} N to the boundary term.

    Returns rows (h, N, h^{1/2}N, prediction, rel_err) plus a trend flag;
    the prediction is the boundary phase-space coefficient, so rel_err
    should shrink as h decreases.
    """
    if prediction is None:
        prediction = edge_weyl_term(circle(p.R, side=p.side),
                                    p.boundary_field(), b0)
    rows = []
    for h in sorted(h_list, reverse=True):
        ph = replace(p, h=float(h))
        rep = count_edge_states(ph, float(h) * b0)
        scaled = math.sqrt(h) * rep.total
        rel = abs(scaled - prediction.main_term) / prediction.main_term
        rows.append({"h": float(h), "N": rep.total, "scaled": scaled,
                     "prediction": prediction.main_term, "rel_err": rel})
    errs = [row["rel_err"] for row in rows]
    trend = all(b <= a + 1e-12 for a, b in zip(errs[:-1], errs[1:]))
    for row in rows:
        row["rel_err_nonincreasing"] = trend
    return rows


def theorem2_study(p: RadialProblem, kappa0: float, h_list,
                   constants: DeGennesConstants | None = None) -> list[dict]:
    """Sweep h at the curvature-split cutoff and report scaled deviations.

    The cutoff is h*Theta0*B + h^{3/2}*C1*B^{1/2}*kappa0 and the rows
    compare h^{1/4} N against the curvature integral coefficient; at
    reachable h the check is a bounded deviation, not convergence.
    """
    if p.field is not None:
        raise ValueError("curvature-split study requires a constant field")
    const = constants or default_constants()
    pred = curvature_term(circle(p.R, side=p.side), kappa0, p.B,
                          constants=const)
    rows = []
    for h in sorted(h_list, reverse=True):
        h = float(h)
        lam = h * const.theta0 * p.B \
            + h**1.5 * const.c1 * math.sqrt(p.B) * kappa0
        rep = count_edge_states(replace(p, h=h), lam)
        scaled = h**0.25 * rep.total
        rows.append({"h": h, "N": rep.total, "scaled": scaled,
                     "prediction": pred.main_term,
                     "deviation": scaled - pred.main_term})
    return rows
