"""gamma_MP three ways: sigma product, orbit product of M(C), and a 2^N-cycle sweep."""
import argparse
import time

from anholonomy.circuit import anholonomic_family
from anholonomy.holonomy import gamma_mp_from_holonomy, holonomy_numeric
from anholonomy.spectrum import permutation_record, predict_gamma_mp
from anholonomy.tracker import itinerary, orbit_phase, sweep


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-qubits", type=int, default=4)
    p.add_argument("--steps", type=int, default=512)
    args = p.parse_args()
    for n in range(1, args.max_qubits + 1):
        t0 = time.perf_counter()
        flow = sweep(anholonomic_family(n), args.steps, 2**n)
        orbit = gamma_mp_from_holonomy(0, holonomy_numeric(flow), permutation_record(n))
        full = orbit_phase(flow, 0)
        dt = time.perf_counter() - t0
        print(
            f"N={n}: sigma product {predict_gamma_mp(n):+d}, "
            f"orbit product {orbit.real:+.9f}{orbit.imag:+.1e}j, "
            f"full orbit {full.real:+.9f}{full.imag:+.1e}j  ({dt:.1f} s)"
        )
        if n <= 3:
            print("    itinerary of 0:", itinerary(flow, 0))


if __name__ == "__main__":
    main()
