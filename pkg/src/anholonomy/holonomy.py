"""Gauge connection and holonomy matrix of the anholonomic family.

The gauge is the one fixed by :func:`anholonomy.spectrum.eigenvector`; in it
the diagonal of the connection vanishes, so the holonomy after one cycle is
the plain exponential ``exp(-2 pi i A)`` of the (lam-independent) connection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import MAX_QUBITS, OutOfRange
from .qmatrix import I2, TWO_PI, Y, dagger, expm_skew, hermiticity_error, kron
from .spectrum import PermutationRecord, eigenbasis
from .tracker import SpectralFlow, ZeroEntry, extract_cycle

GAUGE_NOTE = (
    "one-body vectors cos(x/4)|0>+sin(x/4)|1>, cos(x/4)|1>-sin(x/4)|0>, "
    "each qubit evaluated at the eigenangle of the subcircuit below it"
)

DIAGONAL_TOL = 1e-8


class GaugeError(ValueError):
    pass


@dataclass(frozen=True)
class GaugeConnection:
    n_qubits: int
    matrix: np.ndarray
    gauge_note: str = GAUGE_NOTE
    antihermitian_residual: float = 0.0

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix)

    def check(self, herm_tol: float = 1e-9, diag_tol: float = DIAGONAL_TOL) -> "GaugeConnection":
        """Raise unless the matrix is Hermitian with vanishing diagonal."""
        herm = hermiticity_error(self.matrix)
        if herm > herm_tol:
            raise GaugeError(f"connection not Hermitian: {herm:.2e}")
        diag = float(np.abs(self.diagonal).max())
        if diag > diag_tol:
            raise GaugeError(f"diagonal connection {diag:.2e} does not vanish in this gauge")
        return self


def _check_n(n: int):
    if not 1 <= n <= MAX_QUBITS:
        raise OutOfRange(f"n_qubits must be in [1, {MAX_QUBITS}], got {n}")


def level_rotation(n: int) -> np.ndarray:
    """exp(i pi 2^-n Y (x) J), J = diag(0, 1, ..., 2^(n-1) - 1)."""
    j = np.diag(np.arange(2 ** (n - 1), dtype=float))
    return expm_skew(kron(Y, j), -np.pi / 2**n)


def connection_parts(n: int) -> tuple[np.ndarray, np.ndarray]:
    """(A_H, A_L) for n >= 2: top-qubit and lower-qubit parts of the connection."""
    _check_n(n)
    if n < 2:
        raise ValueError("the split into A_H + A_L needs n >= 2")
    below = connection_analytic(n - 1).matrix
    rot = level_rotation(n)
    a_low = rot @ kron(I2, below) @ dagger(rot)
    a_high = kron(Y, np.eye(2 ** (n - 1))) / 2 ** (n + 1)
    return a_high, a_low


def connection_analytic(n: int) -> GaugeConnection:
    _check_n(n)
    a = Y / 4.0
    for level in range(2, n + 1):
        rot = level_rotation(level)
        a = kron(Y, np.eye(2 ** (level - 1))) / 2 ** (level + 1) + rot @ kron(I2, a) @ dagger(rot)
    return GaugeConnection(n, a)


def connection_fd(n: int, lam: float, h: float = 1e-5, richardson: bool = False) -> GaugeConnection:
    """i <m'|d/dlam|m> by central differences of the analytic eigenvectors.

    The raw estimate is Hermitized; its anti-Hermitian part is kept as a
    diagnostic.  ``richardson`` combines steps h and h/2 for O(h^4) error.
    """
    _check_n(n)
    if not 1e-7 <= h <= 1e-2:
        raise ValueError(f"fd step must lie in [1e-7, 1e-2], got {h}")
    base = eigenbasis(n, lam)

    def central(step):
        return 1j * dagger(base) @ (eigenbasis(n, lam + step) - eigenbasis(n, lam - step)) / (2 * step)

    raw = central(h)
    if richardson:
        raw = (4.0 * central(h / 2) - raw) / 3.0
    herm = 0.5 * (raw + dagger(raw))
    resid = float(np.abs(0.5 * (raw - dagger(raw))).max())
    return GaugeConnection(n, herm, antihermitian_residual=resid)


def holonomy_analytic(n: int) -> np.ndarray:
    """M(C) = exp(-2 pi i A) for the constant connection.

    The diagonal (path-ordered) factor is the identity because the diagonal
    of A vanishes; that is checked rather than assumed.
    """
    conn = connection_analytic(n).check()
    return expm_skew(conn.matrix, TWO_PI)


def holonomy_numeric(flow: SpectralFlow, reference=None, cycle: int = 0) -> np.ndarray:
    """Holonomy from the tracker's discrete parallel transport over one cycle."""
    return extract_cycle(flow, reference=reference, cycle=cycle).holonomy


def gamma_mp_from_holonomy(m0, holonomy: np.ndarray, perm: PermutationRecord) -> complex:
    """Product of holonomy entries M[s(m), m] along the orbit of ``m0``."""
    if not perm.is_single_cycle():
        raise ValueError("permutation is not a single cycle")
    start = m0.m if hasattr(m0, "m") else int(m0)
    out = 1.0 + 0.0j
    for m in perm.orbit(start):
        entry = holonomy[perm.image[m], m]
        if abs(entry) < 0.5:
            raise ZeroEntry(f"|M[{perm.image[m]}, {m}]| = {abs(entry):.3f} along the orbit")
        out *= entry
    return complex(out)
