"""Closed-form eigensystem of U^(N)(lam) and quantum-number anholonomy.

Labels are identified with their principal quantum number
``m = sum_j 2**(j-1) n_j``; ``n_1`` is the least significant bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .circuit import MAX_QUBITS, OutOfRange

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Label:
    n_qubits: int
    m: int

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise OutOfRange(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        if not 0 <= self.m < 2 ** self.n_qubits:
            raise OutOfRange(f"m={self.m} outside [0, 2^{self.n_qubits})")

    @classmethod
    def from_bits(cls, bits) -> "Label":
        """Build from ``(n_N, ..., n_1)``, most significant first."""
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be 0/1, got {bits}")
        m = sum(b << j for j, b in enumerate(reversed(bits)))
        return cls(len(bits), m)

    @classmethod
    def from_string(cls, s: str) -> "Label":
        return cls.from_bits(int(c) for c in s)

    @property
    def bits(self) -> tuple[int, ...]:
        """``(n_N, ..., n_1)``."""
        return tuple((self.m >> (j - 1)) & 1 for j in range(self.n_qubits, 0, -1))

    def bit(self, j: int) -> int:
        """Quantum number n_j, 1-based from the least significant qubit."""
        return (self.m >> (j - 1)) & 1

    def lower(self) -> "Label":
        """Label of the (N-1)-qubit subcircuit, i.e. (n_{N-1}, ..., n_1)."""
        return Label(self.n_qubits - 1, self.m & ((1 << (self.n_qubits - 1)) - 1))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def _label(n: int, m) -> Label:
    if isinstance(m, Label):
        if m.n_qubits != n:
            raise ValueError(f"label {m} is for {m.n_qubits} qubits, not {n}")
        return m
    return Label(n, int(m))


def eigenangle(n: int, m, lam: float) -> float:
    """(2 pi / 2^n)(m + lam / 2 pi), not reduced mod 2 pi."""
    m = _label(n, m).m
    return TWO_PI / 2**n * (m + lam / TWO_PI)


def eigenangles(n: int, lam: float) -> np.ndarray:
    return TWO_PI / 2**n * (np.arange(2**n) + lam / TWO_PI)


def one_body_vector(n: int, lam: float) -> np.ndarray:
    c, s = np.cos(lam / 4.0), np.sin(lam / 4.0)
    if n == 0:
        return np.array([c, s], dtype=np.complex128)
    return np.array([-s, c], dtype=np.complex128)


def eigenvector(n: int, m, lam: float) -> np.ndarray:
    """Eigenvector |m; lam> as a flat array of length 2^n.

    Each new qubit sits in the one-body eigenvector evaluated at the
    eigenangle of the subcircuit below it, so the whole vector is real.
    """
    label = _label(n, m)
    v = one_body_vector(label.bit(1), lam)
    for j in range(2, n + 1):
        below = label.m & ((1 << (j - 1)) - 1)
        v = np.kron(one_body_vector(label.bit(j), eigenangle(j - 1, below, lam)), v)
    return v


def eigenbasis(n: int, lam: float) -> np.ndarray:
    """Matrix whose column m is |m; lam>."""
    return np.column_stack([eigenvector(n, m, lam) for m in range(2**n)])


def successor_arithmetic(m: Label) -> tuple[Label, int]:
    n = m.n_qubits
    top = 2**n - 1
    return Label(n, (m.m + 1) % 2**n), int(m.m == top)


def successor_bitwise(m: Label) -> tuple[Label, int]:
    """Bit-by-bit form: n_j flips iff every lower quantum number is 1.

    The winding number is the product n_N ... n_1.
    """
    n = m.n_qubits
    new_bits = []
    for j in range(1, n + 1):
        lower_all_one = all(m.bit(i) for i in range(1, j))
        new_bits.append(1 - m.bit(j) if lower_all_one else m.bit(j))
    winding = reduce(lambda a, b: a * b, (m.bit(j) for j in range(1, n + 1)))
    return Label.from_bits(reversed(new_bits)), winding


def successor(m: Label) -> tuple[Label, int]:
    """Label reached after one cycle lam -> lam + 2 pi, and its winding number."""
    return successor_bitwise(m)


@dataclass(frozen=True)
class PermutationRecord:
    n_qubits: int
    image: dict[int, int]
    windings: dict[int, int]

    def __post_init__(self):
        size = 2**self.n_qubits
        if sorted(self.image) != list(range(size)) or sorted(self.image.values()) != list(range(size)):
            raise ValueError("image is not a bijection on the labels")

    def orbit(self, start: int = 0) -> list[int]:
        """Labels visited from ``start`` until the orbit closes (start excluded at the end)."""
        out = [start]
        m = self.image[start]
        while m != start:
            out.append(m)
            m = self.image[m]
        return out

    def cycle_lengths(self) -> list[int]:
        seen: set[int] = set()
        lengths = []
        for m in self.image:
            if m not in seen:
                orb = self.orbit(m)
                seen.update(orb)
                lengths.append(len(orb))
        return sorted(lengths)

    def is_single_cycle(self) -> bool:
        return self.cycle_lengths() == [2**self.n_qubits]

    def matrix(self) -> np.ndarray:
        """Permutation matrix S with S[s(m), m] = 1."""
        size = 2**self.n_qubits
        s = np.zeros((size, size))
        for m, t in self.image.items():
            s[t, m] = 1.0
        return s


def permutation_record(n: int) -> PermutationRecord:
    if not 1 <= n <= MAX_QUBITS:
        raise OutOfRange(f"n_qubits must be in [1, {MAX_QUBITS}], got {n}")
    image, windings = {}, {}
    for m in range(2**n):
        s, r = successor(Label(n, m))
        image[m], windings[m] = s.m, r
    return PermutationRecord(n, image, windings)


def sigma_phase_recursive(n: int, m) -> int:
    """Geometric phase factor sigma^(n)(m) from the level-by-level recursion."""
    label = _label(n, m)
    if n == 1:
        return -1 if label.m else 1
    _, r = successor(label)
    return (-1) ** r * sigma_phase_recursive(n - 1, label.lower())


def trailing_ones(m: int) -> int:
    count = 0
    while m & 1:
        count += 1
        m >>= 1
    return count


def sigma_phase(n: int, m) -> int:
    """sigma^(n)(m) = (-1)^(number of trailing ones of m).

    Equivalent to :func:`sigma_phase_recursive`; the test suite checks this
    for every label up to ten qubits.
    """
    return -1 if trailing_ones(_label(n, m).m) % 2 else 1


def predict_gamma_mp(n: int) -> int:
    """Product of sigma over all 2^n labels."""
    if not 1 <= n <= MAX_QUBITS:
        raise OutOfRange(f"n_qubits must be in [1, {MAX_QUBITS}], got {n}")
    out = 1
    for m in range(2**n):
        out *= sigma_phase_recursive(n, m)
    return out
