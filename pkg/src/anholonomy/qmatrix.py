"""Dense complex matrix kernel.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; kets are
``(d, 1)`` columns or flat ``(d,)`` arrays, whichever the caller finds
convenient.  Every function here is pure and returns fresh arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

TWO_PI = 2.0 * np.pi

#: circular distance under which two eigenangles count as degenerate
DEGENERACY_TOL = 1e-8

# cosine-eigenvalue gap below which eigenvectors of the cosine part are
# resolved again with the sine part
_CLUSTER_TOL = 1e-3

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
KET0 = np.array([1, 0], dtype=np.complex128)
KET1 = np.array([0, 1], dtype=np.complex128)


class NotUnitary(ValueError):
    pass


class NotHermitian(ValueError):
    pass


class NoConvergence(RuntimeError):
    pass


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a, dtype=np.complex128)).T


def kron(a, b) -> np.ndarray:
    """Kronecker product; ``a`` is the more significant factor."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*factors) -> np.ndarray:
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


def unitarity_error(u) -> float:
    u = np.asarray(u, dtype=np.complex128)
    return float(np.abs(dagger(u) @ u - np.eye(u.shape[0])).max())


def hermiticity_error(h) -> float:
    h = np.asarray(h, dtype=np.complex128)
    return float(np.abs(h - dagger(h)).max())


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and unitarity_error(u) < tol


def check_unitary(u, tol: float = 1e-10) -> np.ndarray:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise NotUnitary(f"matrix is not square: {u.shape}")
    err = unitarity_error(u)
    if not err < tol:
        raise NotUnitary(f"||U^dag U - I|| = {err:.3e} exceeds {tol:.1e}")
    return u


def circular_distance(a, b):
    """Distance between angles on the circle, in [0, pi]."""
    d = np.mod(np.asarray(a) - np.asarray(b), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def wrap_to_pi(x):
    """Reduce angles into [-pi, pi)."""
    return np.mod(np.asarray(x) + np.pi, TWO_PI) - np.pi


def fix_phase(vectors: np.ndarray, tie_tol: float = 1e-12) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive.

    Entries within ``tie_tol`` of the maximum magnitude count as ties; the
    lowest row index wins.
    """
    v = np.array(vectors, dtype=np.complex128, copy=True)
    flat = v.ndim == 1
    if flat:
        v = v[:, None]
    mags = np.abs(v)
    peak = mags.max(axis=0)
    rows = np.argmax(mags >= peak - tie_tol, axis=0)
    pivots = v[rows, np.arange(v.shape[1])]
    v *= np.conj(pivots) / np.abs(pivots)
    return v[:, 0] if flat else v


@dataclass(frozen=True)
class EigenSystem:
    """Eigendecomposition of a unitary matrix.

    ``angles`` are sorted ascending in [0, 2pi); column ``k`` of ``vectors``
    belongs to ``angles[k]``.  ``degenerate`` is set when two angles are
    within ``DEGENERACY_TOL`` on the circle.
    """

    dim: int
    angles: np.ndarray
    vectors: np.ndarray
    residual: float
    degenerate: bool = False
    min_gap: float = np.inf

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.eigenvalues) @ dagger(v)


def _clusters(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Runs of sorted ``values`` whose consecutive gaps are below ``tol``."""
    close = np.flatnonzero(np.diff(values) < tol)
    if close.size == 0:
        return []
    runs = np.split(close, np.flatnonzero(np.diff(close) > 1) + 1)
    return [np.arange(r[0], r[-1] + 2) for r in runs]


def _hermitian_split(u: np.ndarray) -> np.ndarray:
    cos_part = 0.5 * (u + dagger(u))
    cvals, vecs = np.linalg.eigh(cos_part)
    clusters = _clusters(cvals, _CLUSTER_TOL)
    if clusters:
        sin_part = -0.5j * (u - dagger(u))
        for idx in clusters:
            sub = vecs[:, idx]
            _, rot = np.linalg.eigh(dagger(sub) @ sin_part @ sub)
            vecs[:, idx] = sub @ rot
    return vecs


def _schur_vectors(u: np.ndarray) -> np.ndarray:
    _, vecs = scipy.linalg.schur(u, output="complex")
    return vecs


def eig_unitary(u, tol: float = 1e-10) -> EigenSystem:
    """Eigenangles and orthonormal eigenvectors of a unitary matrix.

    The cosine part ``(U + U^dag)/2`` is diagonalized with a Hermitian solver
    and near-degenerate clusters are split with the sine part.  If the result
    misses the residual contract the complex Schur form is used instead.
    Eigenvectors are phase-fixed with :func:`fix_phase`.
    """
    u = check_unitary(u, tol)
    dim = u.shape[0]
    try:
        vecs = _hermitian_split(u)
        uv = u @ vecs
        diag = np.einsum("ij,ij->j", np.conj(vecs), uv)
        residual = float(np.abs(uv - vecs * diag).max())
        if not residual < 1e-11:
            vecs = _schur_vectors(u)
            uv = u @ vecs
            diag = np.einsum("ij,ij->j", np.conj(vecs), uv)
            residual = float(np.abs(uv - vecs * diag).max())
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(str(exc)) from exc
    if not residual < 1e-10:
        raise NoConvergence(f"eigen-residual {residual:.3e} above 1e-10")

    angles = np.mod(np.angle(diag), TWO_PI)
    # angle() can return exactly 2pi after mod for tiny negative inputs
    angles[angles >= TWO_PI] = 0.0
    order = np.argsort(angles, kind="stable")
    angles = angles[order]
    vecs = fix_phase(vecs[:, order])

    if dim > 1:
        gaps = circular_distance(np.roll(angles, -1), angles)
        min_gap = float(gaps.min())
    else:
        min_gap = np.inf
    return EigenSystem(
        dim=dim,
        angles=angles,
        vectors=vecs,
        residual=residual,
        degenerate=bool(min_gap < DEGENERACY_TOL),
        min_gap=min_gap,
    )


def expm_skew(h, t: float = 1.0, tol: float = 1e-10) -> np.ndarray:
    """Return ``exp(-i t h)`` for Hermitian ``h`` and real ``t``.

    Uses the spectral decomposition ``h = V D V^dag`` so the result is unitary
    to working precision.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise NotHermitian(f"matrix is not square: {h.shape}")
    err = hermiticity_error(h)
    if not err < tol:
        raise NotHermitian(f"||H - H^dag|| = {err:.3e} exceeds {tol:.1e}")
    h = 0.5 * (h + dagger(h))
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * t * w)) @ dagger(v)
