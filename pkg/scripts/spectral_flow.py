"""Dump the tracked eigenangle flow of U^(N) as CSV, ready for plotting.

    python3 scripts/spectral_flow.py --qubits 3 --cycles 8 > flow.csv
"""
import argparse
import sys

from anholonomy.cli import RunConfig, rows_to_csv, track_rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--qubits", type=int, default=2)
    p.add_argument("--steps", type=int, default=256)
    p.add_argument("--cycles", type=int, default=None, help="defaults to 2^N, the full orbit")
    args = p.parse_args()
    cycles = args.cycles or 2**args.qubits
    cfg = RunConfig("track", args.qubits, args.steps, cycles).validate()
    sys.stdout.write(rows_to_csv(track_rows(cfg)))


if __name__ == "__main__":
    main()
