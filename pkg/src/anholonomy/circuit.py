"""Gates and the recursive N-qubit anholonomic circuit family.

Qubit ordering: the qubit added by the last recursion step is the most
significant tensor factor.  With that convention the quantum numbers
``(n_N, ..., n_1)`` of an eigenstate read as the binary digits of its
principal quantum number ``m``, most significant first.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .qmatrix import I2, Z, check_unitary, kron

MAX_QUBITS = 10


class OutOfRange(ValueError):
    pass


def ket_y() -> np.ndarray:
    """(|0> - i|1>)/sqrt(2), the -1 eigenvector of Y."""
    return np.array([1.0, -1.0j], dtype=np.complex128) / np.sqrt(2.0)


def projector_y() -> np.ndarray:
    y = ket_y()
    return np.outer(y, np.conj(y))


def phase_shift(lam: float) -> np.ndarray:
    """exp(i lam |y><y|): multiplies |y> by e^{i lam}, leaves its complement alone."""
    return I2 + (np.exp(1j * lam) - 1.0) * projector_y()


def controlled_y(u) -> np.ndarray:
    """Controlled-``u`` with the control qubit read along the y axis.

    The control is the new most significant qubit:
    ``(1 - |y><y|) (x) 1 + |y><y| (x) u``.
    """
    u = check_unitary(u)
    p = projector_y()
    return kron(I2 - p, np.eye(u.shape[0])) + kron(p, u)


def d_op(u) -> np.ndarray:
    """Add one qubit on top of ``u``: ``controlled_y(u) (Z (x) 1)``."""
    u = check_unitary(u)
    return controlled_y(u) @ kron(Z, np.eye(u.shape[0]))


def one_body(lam: float) -> np.ndarray:
    return phase_shift(lam) @ Z


def build_circuit(n: int, lam: float) -> np.ndarray:
    """U^(n)(lam), the n-qubit member of the family, as a dense matrix."""
    if not 1 <= n <= MAX_QUBITS:
        raise OutOfRange(f"n_qubits must be in [1, {MAX_QUBITS}], got {n}")
    u = one_body(lam)
    for _ in range(n - 1):
        u = d_op(u)
    return u


@dataclass(frozen=True)
class CircuitSpec:
    """A one-parameter family of unitaries lam -> builder(lam).

    ``basis`` optionally maps lam to a reference eigenbasis (columns indexed by
    label); the tracker uses it to name tracks.
    """

    n_qubits: int
    builder: Callable[[float], np.ndarray]
    name: str = "custom"
    basis: Optional[Callable[[float], np.ndarray]] = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def __call__(self, lam: float) -> np.ndarray:
        return self.builder(lam)


def anholonomic_family(n: int) -> CircuitSpec:
    from .spectrum import eigenbasis

    if not 1 <= n <= MAX_QUBITS:
        raise OutOfRange(f"n_qubits must be in [1, {MAX_QUBITS}], got {n}")
    # U(lam) = U(0) + (e^{i lam} - 1) K since lam only enters one projector
    base = build_circuit(n, 0.0)
    slope = build_circuit(n, np.pi) - base
    slope = slope / -2.0

    def builder(lam: float) -> np.ndarray:
        return base + (np.exp(1j * lam) - 1.0) * slope

    return CircuitSpec(
        n_qubits=n,
        builder=builder,
        name=f"U{n}",
        basis=lambda lam: eigenbasis(n, lam),
    )


def constant_family(u) -> CircuitSpec:
    u = check_unitary(u)
    n = int(round(np.log2(u.shape[0])))
    return CircuitSpec(n_qubits=n, builder=lambda lam: u, name="constant")


def product_family(n_copies: int) -> CircuitSpec:
    """Non-interacting composite lam -> u(lam) (x) ... (x) u(lam)."""
    if n_copies < 1:
        raise OutOfRange("n_copies must be >= 1")

    def builder(lam: float) -> np.ndarray:
        u = one_body(lam)
        out = u
        for _ in range(n_copies - 1):
            out = kron(out, u)
        return out

    return CircuitSpec(n_qubits=n_copies, builder=builder, name=f"u^(x){n_copies}")
