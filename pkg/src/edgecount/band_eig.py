"""Exact eigenvalue-counting kernels for tridiagonal and banded Hermitian matrices.

Counting is done without computing eigenvectors: symmetric tridiagonal
matrices use the shifted-LDL^T Sturm recurrence, general banded Hermitian
matrices use a symmetric banded factorization whose inertia equals that of
A - lambda*I (Sylvester's law).  Complex Hermitian matrices are counted
through an interleaved real-symmetric realification, which doubles the
dimension and the bandwidth but keeps a single real factorization path.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

logger = logging.getLogger(__name__)

# Pivot floor relative to matrix scale; pivots smaller in magnitude are
# replaced by a signed floor so the recurrence cannot overflow.
PIVOT_FLOOR_REL = 2.0 ** -50

# Relative shift applied to lambda when the banded factorization hits a
# near-zero pivot, and the maximal number of retries.
EPS_SHIFT_REL = 1e-10
MAX_SHIFT_RETRIES = 3

ORACLE_MAX_DIM = 200


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix given by its diagonal and off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if d.ndim != 1 or d.size < 1:
            raise ValueError("diag must be a vector of length >= 1")
        if e.shape != (d.size - 1,):
            raise ValueError("offdiag must have length n-1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def scale(self) -> float:
        """Gershgorin-type magnitude bound used for pivot floors."""
        s = np.abs(self.diag).max()
        if self.n > 1:
            s = max(s, 2.0 * np.abs(self.offdiag).max())
        return max(s, 1.0)

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros(self.n)
        if self.n > 1:
            r[:-1] += np.abs(self.offdiag)
            r[1:] += np.abs(self.offdiag)
        return float((self.diag - r).min()), float((self.diag + r).max())

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        if self.n > 1:
            a += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return a


@dataclass(frozen=True)
class BandedHermitian:
    """Hermitian banded matrix, lower bands only.

    ``bands[k, j] = A[j+k, j]`` for ``k = 0..half_bandwidth`` (entries beyond
    the matrix are ignored).  The diagonal band must be real.
    """

    n: int
    half_bandwidth: int
    bands: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bands)
        if b.shape != (self.half_bandwidth + 1, self.n):
            raise ValueError("bands must have shape (half_bandwidth+1, n)")
        if self.half_bandwidth >= self.n:
            raise ValueError("half_bandwidth must be < n")
        if not np.all(np.isfinite(b)):
            raise ValueError("matrix entries must be finite")
        if np.iscomplexobj(b) and np.abs(b[0].imag).max() > 0:
            raise ValueError("diagonal band must be real")
        object.__setattr__(self, "bands", b)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.bands)

    def to_dense(self) -> np.ndarray:
        dtype = complex if self.is_complex else float
        a = np.zeros((self.n, self.n), dtype=dtype)
        for k in range(self.half_bandwidth + 1):
            idx = np.arange(self.n - k)
            a[idx + k, idx] = self.bands[k, : self.n - k]
            if k > 0:
                a[idx, idx + k] = np.conj(self.bands[k, : self.n - k])
        return a

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros(self.n)
        for k in range(1, self.half_bandwidth + 1):
            m = np.abs(self.bands[k, : self.n - k])
            r[: self.n - k] += m
            r[k:] += m
        d = self.bands[0].real
        return float((d - r).min()), float((d + r).max())


@dataclass(frozen=True)
class Inertia:
    """Signature triple of a Hermitian matrix."""

    n_neg: int
    n_zero: int
    n_pos: int

    def __post_init__(self):
        if min(self.n_neg, self.n_zero, self.n_pos) < 0:
            raise ValueError("inertia counts must be nonnegative")

    @property
    def n(self) -> int:
        return self.n_neg + self.n_zero + self.n_pos


def sturm_count(T: SymTridiag, lam: float) -> int:
    """Number of eigenvalues of T strictly below lam.

    Shifted-LDL^T recurrence d_{k} = a_k - lam - e_{k-1}^2 / d_{k-1}; the
    number of negative pivots equals the eigenvalue count.  Pivots below
    the floor are replaced by a signed floor (standard underflow guard).
    """
    d = T.diag
    e = T.offdiag
    floor = PIVOT_FLOOR_REL * T.scale()
    count = 0
    p = 1.0
    for k in range(T.n):
        p = d[k] - lam - (e[k - 1] * e[k - 1] / p if k > 0 else 0.0)
        if abs(p) < floor:
            p = -floor if p < 0 else floor
        if p < 0:
            count += 1
    return count


def _sturm_kernel_numpy(diags, offsq, lams, floor):
    n, m = diags.shape
    count = np.zeros(m, dtype=np.int64)
    p = np.ones(m)
    for k in range(n):
        p = diags[k] - lams - (offsq[k - 1] / p if k > 0 else 0.0)
        tiny = np.abs(p) < floor
        if np.any(tiny):
            p = np.where(tiny, np.where(p < 0, -floor, floor), p)
        count += p < 0
    return count


try:
    from numba import njit

    @njit(cache=True)
    def _sturm_kernel_numba(diags, offsq, lams, floor):  # pragma: no cover
        n, m = diags.shape
        count = np.zeros(m, dtype=np.int64)
        for j in range(m):
            p = 1.0
            c = 0
            f = floor[j]
            for k in range(n):
                if k > 0:
                    p = diags[k, j] - lams[j] - offsq[k - 1, j] / p
                else:
                    p = diags[0, j] - lams[j]
                if -f < p < f:
                    p = -f if p < 0 else f
                if p < 0:
                    c += 1
            count[j] = c
        return count

    _HAVE_NUMBA = True
except ImportError:      # pragma: no cover
    _HAVE_NUMBA = False


def sturm_counts_batch(diags: np.ndarray, offdiags: np.ndarray,
                       lams: np.ndarray) -> np.ndarray:
    """Vectorized Sturm counts for a family of tridiagonal matrices.

    Parameters
    ----------
    diags : (n, m) array
        Diagonals of m matrices of common dimension n (columns).
    offdiags : (n-1, m) or (n-1,) array
        Off-diagonals, possibly shared between the matrices.
    lams : (m,) array or scalar
        Shift per matrix.

    Returns
    -------
    (m,) integer array of eigenvalue counts strictly below the shifts.
    """
    diags = np.ascontiguousarray(diags, dtype=float)
    n, m = diags.shape
    offsq = np.square(np.asarray(offdiags, dtype=float))
    if offsq.ndim == 1:
        offsq = offsq[:, None]
    offsq = np.ascontiguousarray(np.broadcast_to(offsq, (max(n - 1, 0), m)))
    lams = np.ascontiguousarray(np.broadcast_to(
        np.asarray(lams, dtype=float), (m,)))
    scale = np.maximum(np.abs(diags).max(axis=0), 1.0)
    if n > 1:
        scale = np.maximum(scale, 2.0 * np.sqrt(offsq.max(axis=0)))
    floor = PIVOT_FLOOR_REL * scale
    if _HAVE_NUMBA:
        return _sturm_kernel_numba(diags, offsq, lams, floor)
    return _sturm_kernel_numpy(diags, offsq, lams, floor)


def bisect_eigenvalue(T: SymTridiag, k: int, tol: float = 1e-12) -> float:
    """k-th smallest eigenvalue of T within +-tol, by bisection on sturm_count."""
    if not 0 <= k < T.n:
        raise ValueError("eigenvalue index out of range")
    if tol <= 0:
        raise ValueError("tol must be positive")
    return float(bisect_eigenvalues_batch(T.diag[:, None], T.offdiag,
                                          np.array([k]), tol)[0])


def bisect_eigenvalues_batch(diags: np.ndarray, offdiags: np.ndarray,
                             ks: np.ndarray, tol: float = 1e-12,
                             lo: np.ndarray | None = None,
                             hi: np.ndarray | None = None) -> np.ndarray:
    """Selected eigenvalues of a family of tridiagonal matrices by bisection.

    ``diags`` has shape (n, m); ``ks[i]`` is the index (0-based, ascending)
    of the eigenvalue wanted from matrix i.  All bisections run in lockstep
    so each step is a single vectorized Sturm pass.  Optional per-matrix
    brackets (lo, hi) tighten the Gershgorin start interval; they must
    enclose the wanted eigenvalues.
    """
    diags = np.asarray(diags, dtype=float)
    n, m = diags.shape
    ks = np.broadcast_to(np.asarray(ks, dtype=np.int64), (m,))
    offs = np.asarray(offdiags, dtype=float)
    if lo is None or hi is None:
        offcol = offs[:, None] if offs.ndim == 1 else offs
        r = np.zeros((n, 1 if offs.ndim == 1 else m))
        r[:-1] += np.abs(offcol)
        r[1:] += np.abs(offcol)
        lo = (diags - r).min(axis=0) * np.ones(m)
        hi = (diags + r).max(axis=0) * np.ones(m)
    else:
        lo = np.asarray(lo, dtype=float) * np.ones(m)
        hi = np.asarray(hi, dtype=float) * np.ones(m)
    while True:
        mid = 0.5 * (lo + hi)
        c = sturm_counts_batch(diags, offs, mid)
        below = c <= ks
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo < 2.0 * tol):
            return 0.5 * (lo + hi)


def realify(A: BandedHermitian) -> BandedHermitian:
    """Interleaved real-symmetric realification of a complex Hermitian matrix.

    Node j maps to rows (2j, 2j+1); the entry x+iy becomes the 2x2 block
    [[x, -y], [y, x]].  Every eigenvalue of A appears with doubled
    multiplicity.  Bandwidth 2b+1, dimension 2n.
    """
    n, b = A.n, A.half_bandwidth
    bands = np.zeros((2 * b + 2, 2 * n), dtype=float)
    for k in range(b + 1):
        x = A.bands[k, : n - k].real
        y = A.bands[k, : n - k].imag if A.is_complex else np.zeros(n - k)
        cols = 2 * np.arange(n - k)
        # block rows (2j+2k, 2j+2k+1) against columns (2j, 2j+1)
        bands[2 * k, cols] = x            # (2j+2k,   2j)
        bands[2 * k + 1, cols] = y        # (2j+2k+1, 2j)
        bands[2 * k, cols + 1] = x        # (2j+2k+1, 2j+1)
        if k > 0:
            bands[2 * k - 1, cols + 1] = -y   # (2j+2k, 2j+1)
    return BandedHermitian(n=2 * n, half_bandwidth=2 * b + 1, bands=bands)


def _ldlt_band_inertia(bands: np.ndarray, floor: float) -> tuple[int, int, int] | None:
    """Inertia of a real symmetric banded matrix via LDL^T without pivoting.

    Returns None on factorization breakdown (pivot magnitude below floor).
    ``bands`` is consumed (copy before calling).
    """
    bw, n = bands.shape
    b = bw - 1
    n_neg = n_pos = 0
    for k in range(n):
        d = bands[0, k]
        if abs(d) < floor:
            return None
        if d < 0:
            n_neg += 1
        else:
            n_pos += 1
        r = min(b, n - 1 - k)
        if r == 0:
            continue
        w = bands[1:r + 1, k]
        # Trailing update: A[k+1+i, k+1+j] -= w[i]*w[j]/d for j <= i < r.
        # In band storage: bands[i, k+1+j] -= w[i+j]*w[j]/d, done as one
        # Hankel-shaped vectorized subtraction per column k.
        wpad = np.zeros(2 * r - 1)
        wpad[:r] = w
        hank = sliding_window_view(wpad, r)     # hank[j, i] = w[i+j]
        bands[:r, k + 1:k + 1 + r] -= (hank * (w / d)[:, None]).T
    return n_neg, 0, n_pos


def banded_inertia(A: BandedHermitian, lam: float) -> Inertia:
    """Inertia of A - lam*I.

    Complex Hermitian input is realified first; the returned counts are then
    halved (realification doubles every multiplicity).  Near-zero pivots
    trigger a retry with lam perturbed by a relative shift, logged and
    bounded by MAX_SHIFT_RETRIES; the perturbed count is reported with
    n_zero = 0 since counting is shift-insensitive away from eigenvalues.
    """
    R = realify(A) if A.is_complex else A
    half = A.is_complex
    scale = max(abs(R.gershgorin()[0]), abs(R.gershgorin()[1]), abs(lam), 1.0)
    floor = PIVOT_FLOOR_REL * scale
    shift = 0.0
    for attempt in range(MAX_SHIFT_RETRIES + 1):
        work = R.bands.astype(float, copy=True)
        work[0] -= lam + shift
        res = _ldlt_band_inertia(work, floor)
        if res is not None:
            n_neg, n_zero, n_pos = res
            if attempt > 0:
                logger.info("banded_inertia retried with relative shift %g",
                            shift / scale)
            if half:
                n_neg //= 2
                n_pos //= 2
            return Inertia(n_neg=n_neg, n_zero=n_zero, n_pos=n_pos)
        shift = (attempt + 1) * EPS_SHIFT_REL * scale
    raise ArithmeticError(
        f"banded factorization broke down after {MAX_SHIFT_RETRIES} shifted retries")


def count_below(A: BandedHermitian, lam: float) -> int:
    """Number of eigenvalues of A strictly below lam."""
    return banded_inertia(A, lam).n_neg


def dense_eigs_oracle(A: np.ndarray) -> np.ndarray:
    """All eigenvalues of a dense Hermitian matrix, sorted ascending.

    Test oracle, restricted to n <= 200.  Backed by LAPACK through
    numpy.linalg.eigvalsh; accuracy is well below 1e-10 times the spectral
    norm at these sizes.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("oracle needs a square matrix")
    if A.shape[0] > ORACLE_MAX_DIM:
        raise ValueError(f"oracle restricted to n <= {ORACLE_MAX_DIM}")
    if not np.allclose(A, A.conj().T, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ValueError("oracle needs a Hermitian matrix")
    return np.sort(np.linalg.eigvalsh(A))
