"""Numerical continuation of eigenvalue/eigenvector tracks along lam.

Nothing here uses the closed-form spectrum.  Tracks are followed by maximal
overlap between neighbouring grid points, each matched vector is phase-fixed
so the overlap with its predecessor is real positive (discrete parallel
transport), and eigenangles are unwrapped by picking the branch nearest the
previous value.  Permutations and winding numbers are read off afterwards.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .circuit import CircuitSpec, constant_family, product_family
from .qmatrix import DEGENERACY_TOL, TWO_PI, dagger, eig_unitary, wrap_to_pi

log = logging.getLogger(__name__)

MATCH_FLOOR = 0.5
MATCH_WARN = 0.95
MIN_STEPS = 64
DEFAULT_STEPS = 512


class TrackingError(RuntimeError):
    pass


class AmbiguousMatch(TrackingError):
    pass


class DegeneracyEncountered(TrackingError):
    def __init__(self, msg: str, lam: float, gap: float):
        super().__init__(msg)
        self.lam = lam
        self.gap = gap


class NonBijective(TrackingError):
    pass


class ZeroEntry(TrackingError):
    pass


@dataclass(frozen=True)
class SpectralFlow:
    """Continued eigensystem on a uniform lam grid.

    ``angles[k, t]`` is the unwrapped eigenangle of track ``t`` at grid point
    ``k``; ``quality[k, t]`` is the squared overlap with the previous point
    (1 at k=0).  Track vectors are kept at every cycle boundary in
    ``checkpoints[c]`` (shape ``(dim, tracks)``); ``vectors`` holds all grid
    points when the sweep was asked to keep them.
    """

    n_qubits: int
    steps_per_cycle: int
    cycles: int
    lambda0: float
    grid: np.ndarray
    angles: np.ndarray
    quality: np.ndarray
    checkpoints: np.ndarray
    vectors: Optional[np.ndarray] = None
    min_gap: float = np.inf
    reference: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def degenerate_flags(self) -> np.ndarray:
        # sweep refuses degenerate points, so a finished flow has none
        return np.zeros(len(self.grid), dtype=bool)

    def start_vectors(self) -> np.ndarray:
        return self.checkpoints[0]

    def vectors_at_cycle(self, c: int) -> np.ndarray:
        return self.checkpoints[c]


def _grid(lambda0: float, steps: int, cycles: int) -> np.ndarray:
    k = np.arange(steps * cycles + 1)
    return lambda0 + TWO_PI * k / steps


def sweep(
    spec: CircuitSpec,
    steps_per_cycle: int = DEFAULT_STEPS,
    cycles: int = 1,
    lambda0: float = 0.0,
    keep_vectors: bool = False,
    strict: bool = True,
    observer: Optional[Callable[[int, float, np.ndarray], None]] = None,
) -> SpectralFlow:
    """Diagonalize ``spec`` along lam in [lambda0, lambda0 + 2 pi cycles].

    Tracks start at the eigenvectors of ``spec(lambda0)`` in ascending
    eigenangle order.  ``strict=False`` lifts the ``steps_per_cycle >= 64``
    floor, for coarse illustrative grids only.  ``observer(k, lam, vectors)``
    is called with the track vectors at every grid point.
    """
    if strict and steps_per_cycle < MIN_STEPS:
        raise ValueError(f"steps_per_cycle must be >= {MIN_STEPS}, got {steps_per_cycle}")
    if steps_per_cycle < 1 or cycles < 1:
        raise ValueError("steps_per_cycle and cycles must be positive")

    grid = _grid(lambda0, steps_per_cycle, cycles)
    dim = spec.dim
    angles = np.empty((len(grid), dim))
    quality = np.ones((len(grid), dim))
    checkpoints = np.empty((cycles + 1, dim, dim), dtype=np.complex128)
    all_vectors = np.empty((len(grid), dim, dim), dtype=np.complex128) if keep_vectors else None
    min_gap = np.inf
    worst = 1.0

    current = None
    for k, lam in enumerate(grid):
        es = eig_unitary(spec(lam))
        min_gap = min(min_gap, es.min_gap)
        if es.degenerate:
            raise DegeneracyEncountered(
                f"eigenangles within {DEGENERACY_TOL:g} at lambda={lam:.6f} "
                f"(gap {es.min_gap:.2e}); refusing to continue through a crossing",
                lam=float(lam),
                gap=es.min_gap,
            )
        if current is None:
            current = es.vectors
            angles[0] = es.angles
        else:
            overlaps = dagger(current) @ es.vectors
            weights = np.abs(overlaps) ** 2
            match = np.argmax(weights, axis=1)
            q = weights[np.arange(dim), match]
            if len(set(match.tolist())) != dim:
                raise AmbiguousMatch(f"two tracks claim one eigenvector at lambda={lam:.6f}")
            if q.min() < MATCH_FLOOR:
                raise AmbiguousMatch(
                    f"best squared overlap {q.min():.3f} below {MATCH_FLOOR} at "
                    f"lambda={lam:.6f}; grid too coarse"
                )
            worst = min(worst, float(q.min()))
            ph = overlaps[np.arange(dim), match]
            current = es.vectors[:, match] * (np.conj(ph) / np.abs(ph))
            prev = angles[k - 1]
            angles[k] = prev + wrap_to_pi(es.angles[match] - prev)
            quality[k] = q
        if all_vectors is not None:
            all_vectors[k] = current
        if observer is not None:
            observer(k, float(lam), current)
        if k % steps_per_cycle == 0:
            checkpoints[k // steps_per_cycle] = current

    if worst < MATCH_WARN:
        warnings.warn(
            f"track match quality dropped to {worst:.3f} (< {MATCH_WARN}); consider more steps",
            RuntimeWarning,
            stacklevel=2,
        )
    reference = spec.basis(lambda0) if spec.basis is not None else None
    log.debug("sweep %s: %d points, min gap %.3e", spec.name, len(grid), min_gap)
    return SpectralFlow(
        n_qubits=spec.n_qubits,
        steps_per_cycle=steps_per_cycle,
        cycles=cycles,
        lambda0=float(lambda0),
        grid=grid,
        angles=angles,
        quality=quality,
        checkpoints=checkpoints,
        vectors=all_vectors,
        min_gap=min_gap,
        reference=reference,
    )


@dataclass(frozen=True)
class CycleResult:
    """What one cycle lam0 -> lam0 + 2 pi does to the labelled eigenstates.

    Keys are labels of the reference basis.  ``holonomy[m', m]`` is the
    overlap of reference vector m' with the transported reference vector m.
    """

    permutation: dict[int, int]
    windings: dict[int, int]
    holonomy: np.ndarray
    sigma: dict[int, complex]
    gamma_mp: complex
    track_of_label: dict[int, int] = field(default_factory=dict)

    def orbit(self, start: int = 0) -> list[int]:
        out = [start]
        m = self.permutation[start]
        while m != start:
            out.append(m)
            m = self.permutation[m]
        return out


def _reference(flow: SpectralFlow, reference) -> np.ndarray:
    if reference is not None:
        return np.asarray(reference, dtype=np.complex128)
    if flow.reference is not None:
        return flow.reference
    return flow.start_vectors()


def label_vectors(vectors: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Label of the reference column each vector overlaps most."""
    return np.argmax(np.abs(dagger(reference) @ vectors) ** 2, axis=0)


def extract_cycle(flow: SpectralFlow, reference=None, cycle: int = 0) -> CycleResult:
    """Permutation, windings and holonomy for cycle number ``cycle`` of ``flow``.

    ``reference`` is a basis at lam0 (columns = labels); it defaults to the
    family's analytic basis if the flow carries one, else the start vectors.
    """
    if not 0 <= cycle < flow.cycles:
        raise ValueError(f"flow has {flow.cycles} cycles, asked for {cycle}")
    ref = _reference(flow, reference)
    start = flow.checkpoints[cycle]
    end = flow.checkpoints[cycle + 1]
    k0 = cycle * flow.steps_per_cycle
    k1 = k0 + flow.steps_per_cycle

    start_labels = label_vectors(start, ref)
    end_labels = label_vectors(end, ref)
    if len(set(start_labels.tolist())) != flow.dim:
        raise NonBijective("start vectors do not identify distinct reference labels")
    if len(set(end_labels.tolist())) != flow.dim:
        raise NonBijective("two tracks end on the same reference label; grid too coarse?")

    track_of = {int(m): t for t, m in enumerate(start_labels)}
    permutation = {int(start_labels[t]): int(end_labels[t]) for t in range(flow.dim)}
    windings = {}
    for t in range(flow.dim):
        target = track_of[int(end_labels[t])]
        delta = flow.angles[k1, t] - flow.angles[k0, target]
        windings[int(start_labels[t])] = int(np.rint(delta / TWO_PI))

    # transport of ref_m: the tracks carry start -> end linearly, so
    # ref_m = sum_t start_t <start_t|ref_m> is carried to sum_t end_t <start_t|ref_m>
    holonomy = dagger(ref) @ end @ (dagger(start) @ ref)
    sigma = {m: complex(holonomy[permutation[m], m]) for m in permutation}
    gamma = complex(np.prod(list(sigma.values())))
    return CycleResult(
        permutation=permutation,
        windings=windings,
        holonomy=holonomy,
        sigma=sigma,
        gamma_mp=gamma,
        track_of_label=track_of,
    )


def itinerary(flow: SpectralFlow, start: int = 0, reference=None) -> list[int]:
    """Label held by the track that starts at ``start`` at each cycle boundary."""
    ref = _reference(flow, reference)
    t = int(np.flatnonzero(label_vectors(flow.checkpoints[0], ref) == start)[0])
    return [int(label_vectors(flow.checkpoints[c][:, [t]], ref)[0]) for c in range(flow.cycles + 1)]


def orbit_phase(flow: SpectralFlow, start: int = 0, reference=None) -> complex:
    """Phase factor picked up by reference state ``start`` over the whole flow.

    When the flow spans the full orbit (the track is back at its start label),
    this is the Berry phase factor after all the repetitions of the loop.
    """
    ref = _reference(flow, reference)
    v0 = flow.checkpoints[0]
    t = int(np.flatnonzero(label_vectors(v0, ref) == start)[0])
    r = ref[:, start]
    return complex(np.vdot(r, flow.checkpoints[-1][:, t]) * np.vdot(v0[:, t], r))


@dataclass(frozen=True)
class NegativeControl:
    n_copies: int
    degenerate: bool
    detail: str
    lam: Optional[float] = None
    gap: Optional[float] = None
    cycle: Optional[CycleResult] = None

    @property
    def anholonomy_survives(self) -> bool:
        return (
            self.cycle is not None
            and sorted(self.cycle.permutation) == sorted(self.cycle.orbit(0))
            and len(self.cycle.permutation) > 1
        )


def negative_control(n_copies: int = 2, steps: int = DEFAULT_STEPS) -> NegativeControl:
    """Sweep the non-interacting composite u(lam) (x) u(lam).

    Its eigenangles are (n1 + n2) pi + lam, so labels 01 and 10 coincide for
    every lam and the tracker must refuse.  ``n_copies=1`` reduces to the
    single-qubit family.
    """
    if n_copies not in (1, 2):
        raise ValueError("negative control is defined for 1 or 2 copies")
    spec = product_family(n_copies)
    try:
        flow = sweep(spec, steps, 1)
    except DegeneracyEncountered as exc:
        return NegativeControl(n_copies, True, str(exc), lam=exc.lam, gap=exc.gap)
    return NegativeControl(n_copies, False, "no degeneracy", cycle=extract_cycle(flow))


def constant_control(u, steps: int = MIN_STEPS) -> CycleResult:
    return extract_cycle(sweep(constant_family(u), steps, 1))
