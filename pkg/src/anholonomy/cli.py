"""Command-line front end.

    anholonomy <command> --qubits N --steps S --cycles K --lambda0 X
               --out PATH --format json|csv [--fd-step H] [--no-timestamp]

Exit codes: 0 every verdict passed, 1 some verdict failed, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .circuit import MAX_QUBITS, OutOfRange, anholonomic_family, build_circuit
from .holonomy import (
    connection_analytic,
    connection_fd,
    connection_parts,
    gamma_mp_from_holonomy,
    holonomy_analytic,
)
from .qmatrix import TWO_PI, circular_distance, eig_unitary, hermiticity_error, unitarity_error
from .spectrum import (
    Label,
    eigenangles,
    eigenbasis,
    permutation_record,
    predict_gamma_mp,
    sigma_phase,
    sigma_phase_recursive,
    successor_arithmetic,
    successor_bitwise,
)
from .tracker import (
    MIN_STEPS,
    TrackingError,
    extract_cycle,
    label_vectors,
    negative_control,
    orbit_phase,
    sweep,
)

SCHEMA = 1
COMMANDS = ("spectrum", "track", "holonomy", "verify", "negative-control")
CSV_COLUMNS = ("step", "lambda", "track_id", "eigenangle_unwrapped", "analytic_m", "match_quality")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TOL_UNITARY = 1e-12
TOL_ANGLE = 1e-9
TOL_HOLONOMY = 1e-6
TOL_STRUCTURE = 1e-9
TOL_HERMITIAN = 1e-9
TOL_DIAGONAL = 1e-8
TOL_FD = 1e-6
TOL_COMMUTATOR = 1e-9
TOL_GAMMA = 1e-6


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n_qubits: int = 1
    steps_per_cycle: int = 512
    cycles: int = 1
    lambda0: float = 0.0
    out_path: str = "-"
    format: str = "json"
    fd_step: float = 1e-5
    timestamp: bool = True

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ConfigError(f"--qubits must be in [1, {MAX_QUBITS}]")
        if self.steps_per_cycle < MIN_STEPS:
            raise ConfigError(f"--steps must be >= {MIN_STEPS}")
        if self.cycles < 1:
            raise ConfigError("--cycles must be >= 1")
        if self.format not in ("json", "csv"):
            raise ConfigError("--format must be json or csv")
        if not 1e-7 <= self.fd_step <= 1e-2:
            raise ConfigError("--fd-step must lie in [1e-7, 1e-2]")
        if not np.isfinite(self.lambda0):
            raise ConfigError("--lambda0 must be finite")
        return self


def cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def cmatrix(m) -> list[list[list[float]]]:
    return [[cplx(z) for z in row] for row in np.asarray(m)]


@dataclass
class Report:
    config: RunConfig
    analytic: dict = field(default_factory=dict)
    numeric: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)

    def check(self, name: str, value, tol, passed: bool | None = None):
        """Record a verdict; by default it passes when ``value <= tol``."""
        if passed is None:
            passed = bool(value <= tol)
        if isinstance(value, (np.floating, np.integer)):
            value = value.item()
        self.verdicts[name] = {"pass": bool(passed), "value": value, "tol": tol}
        return passed

    @property
    def passed(self) -> bool:
        return all(v["pass"] for v in self.verdicts.values())

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        cfg.pop("timestamp")
        out = {"schema": SCHEMA, "version": __version__, "config": cfg}
        if self.config.timestamp:
            out["timestamp"] = datetime.now(timezone.utc).isoformat()
        out.update(
            analytic=self.analytic,
            numeric=self.numeric,
            verdicts=self.verdicts,
            passed=self.passed,
        )
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["verdict", "pass", "value", "tol"])
        for name, v in self.verdicts.items():
            w.writerow([name, v["pass"], v["value"], v["tol"]])
        return buf.getvalue()


def expected_windings(n: int, lambda0: float) -> list[int]:
    """Winding numbers on the tracker's branch, eigenangles taken in [0, 2pi) at lambda0."""
    rec = permutation_record(n)
    th0 = eigenangles(n, lambda0)
    th1 = eigenangles(n, lambda0 + TWO_PI)
    base = TWO_PI * np.floor(th0 / TWO_PI)
    out = []
    for m in range(2**n):
        s = rec.image[m]
        delta = (th1[m] - base[m]) - (th0[s] - base[s])
        out.append(int(np.rint(delta / TWO_PI)))
    return out


def _analytic_block(n: int, lambda0: float) -> dict:
    rec = permutation_record(n)
    return {
        "eigenangles": [float(x) for x in eigenangles(n, lambda0)],
        "permutation": [rec.image[m] for m in range(2**n)],
        "windings": expected_windings(n, lambda0),
        "sigma": [sigma_phase(n, m) for m in range(2**n)],
        "gamma_mp": cplx(predict_gamma_mp(n)),
    }


def _spectrum_checks(rep: Report, n: int, lambda0: float):
    u = build_circuit(n, lambda0)
    rep.check("circuit_unitary", unitarity_error(u), TOL_UNITARY)
    es = eig_unitary(u)
    analytic = np.mod(eigenangles(n, lambda0), TWO_PI)
    dev = float(circular_distance(es.angles[:, None], analytic[None, :]).min(axis=1).max())
    rep.numeric["eigenangles"] = [float(x) for x in es.angles]
    rep.numeric["eigen_residual"] = es.residual
    rep.check("eigenangles_closed_form", dev, TOL_ANGLE)
    floor = TWO_PI / 2**n - 1e-8
    rep.check("no_degeneracy", es.min_gap, floor, passed=bool(es.min_gap > floor))


def _holonomy_checks(rep: Report, cfg: RunConfig):
    n = cfg.n_qubits
    conn = connection_analytic(n)
    a = conn.matrix
    rep.check("connection_hermitian", hermiticity_error(a), TOL_HERMITIAN)
    rep.check("connection_zero_diagonal", float(np.abs(np.diag(a)).max()), TOL_DIAGONAL)
    if n >= 2:
        ah, al = connection_parts(n)
        rep.check("connection_parts_commute", float(np.abs(ah @ al - al @ ah).max()), TOL_COMMUTATOR)
    fd_dev = max(
        float(np.abs(connection_fd(n, lam, cfg.fd_step).matrix - a).max())
        for lam in (cfg.lambda0, cfg.lambda0 + 2.0)
    )
    rep.numeric["connection_fd_deviation"] = fd_dev
    rep.check("connection_fd_vs_analytic", fd_dev, TOL_FD)

    m_an = holonomy_analytic(n)
    rec = permutation_record(n)
    s = rec.matrix()
    rep.check("holonomy_analytic_unitary", unitarity_error(m_an), TOL_STRUCTURE)
    rep.check("holonomy_analytic_pattern", float(np.abs(np.abs(m_an) - s).max()), TOL_STRUCTURE)
    predicted = s * np.array([sigma_phase(n, m) for m in range(2**n)])[None, :]
    rep.check("holonomy_analytic_sigma", float(np.abs(m_an - predicted).max()), TOL_STRUCTURE)
    rep.analytic["holonomy"] = cmatrix(m_an)
    return m_an, rec


def _numeric_cycle(rep: Report, cfg: RunConfig, m_an, rec):
    n = cfg.n_qubits
    try:
        flow = sweep(anholonomic_family(n), cfg.steps_per_cycle, cfg.cycles, cfg.lambda0)
        cyc = extract_cycle(flow)
    except TrackingError as exc:
        rep.check("tracking", str(exc), None, passed=False)
        return None
    perm = [cyc.permutation[m] for m in range(2**n)]
    wind = [cyc.windings[m] for m in range(2**n)]
    rep.numeric.update(
        permutation=perm,
        windings=wind,
        holonomy=cmatrix(cyc.holonomy),
        sigma=[cplx(cyc.sigma[m]) for m in range(2**n)],
        gamma_mp=cplx(cyc.gamma_mp),
        min_gap=flow.min_gap,
        min_match_quality=float(flow.quality.min()),
    )
    rep.check("permutation_matches", 0 if perm == rep.analytic["permutation"] else 1, 0)
    rep.check("windings_match", 0 if wind == rep.analytic["windings"] else 1, 0)
    rep.check("single_cycle", len(cyc.orbit(0)), 2**n, passed=len(cyc.orbit(0)) == 2**n)
    hol_dev = float(np.abs(cyc.holonomy - m_an).max())
    rep.numeric["holonomy_max_deviation"] = hol_dev
    rep.check("holonomy_numeric_vs_analytic", hol_dev, TOL_HOLONOMY)
    rep.check("gamma_mp_numeric", abs(cyc.gamma_mp + 1), TOL_GAMMA)
    if rec.is_single_cycle():
        orbit = gamma_mp_from_holonomy(Label(n, 0), cyc.holonomy, rec)
        rep.numeric["gamma_mp_orbit_product"] = cplx(orbit)
        rep.check("gamma_mp_orbit_product", abs(orbit + 1), TOL_GAMMA)
    if cfg.cycles >= 2**n:
        full = sweep(anholonomic_family(n), cfg.steps_per_cycle, 2**n, cfg.lambda0) if cfg.cycles != 2**n else flow
        phase = orbit_phase(full, 0)
        rep.numeric["gamma_mp_full_orbit"] = cplx(phase)
        rep.check("gamma_mp_full_orbit", abs(phase + 1), TOL_GAMMA)
    return cyc


def cmd_spectrum(cfg: RunConfig) -> Report:
    n = cfg.n_qubits
    rep = Report(cfg, analytic=_analytic_block(n, cfg.lambda0))
    _spectrum_checks(rep, n, cfg.lambda0)
    rec = permutation_record(n)
    rep.check("single_cycle", max(rec.cycle_lengths()), 2**n, passed=rec.is_single_cycle())
    forms_agree = all(
        successor_bitwise(Label(n, m)) == successor_arithmetic(Label(n, m)) for m in range(2**n)
    )
    rep.check("successor_forms_agree", 0 if forms_agree else 1, 0)
    sigma_agree = all(sigma_phase(n, m) == sigma_phase_recursive(n, m) for m in range(2**n))
    rep.check("sigma_closed_form_agrees", 0 if sigma_agree else 1, 0)
    rep.check("gamma_mp_predicted", predict_gamma_mp(n), -1, passed=predict_gamma_mp(n) == -1)
    return rep


def cmd_holonomy(cfg: RunConfig) -> Report:
    rep = Report(cfg, analytic=_analytic_block(cfg.n_qubits, cfg.lambda0))
    rep.analytic["connection"] = cmatrix(connection_analytic(cfg.n_qubits).matrix)
    m_an, rec = _holonomy_checks(rep, cfg)
    _numeric_cycle(rep, cfg, m_an, rec)
    return rep


def cmd_verify(cfg: RunConfig) -> Report:
    """Circuit, closed-form spectrum, tracker, holonomy and gamma_MP in one pass."""
    n = cfg.n_qubits
    rep = Report(cfg, analytic=_analytic_block(n, cfg.lambda0))
    _spectrum_checks(rep, n, cfg.lambda0)
    rep.check(
        "gamma_mp_predicted", predict_gamma_mp(n), -1, passed=predict_gamma_mp(n) == -1
    )
    m_an, rec = _holonomy_checks(rep, cfg)
    _numeric_cycle(rep, cfg, m_an, rec)
    return rep


def cmd_negative_control(cfg: RunConfig) -> Report:
    rep = Report(cfg)
    outcome = negative_control(2, cfg.steps_per_cycle)
    rep.numeric.update(
        family="u(lambda) (x) u(lambda)",
        degenerate=outcome.degenerate,
        lambda_at=outcome.lam,
        gap=outcome.gap,
        detail=outcome.detail,
    )
    rep.analytic["composite_eigenangles_at_0"] = sorted(
        float(np.mod((a + b) * np.pi, TWO_PI)) for a in (0, 1) for b in (0, 1)
    )
    rep.check(
        "anholonomy absent: expected",
        outcome.gap if outcome.gap is not None else None,
        1e-8,
        passed=outcome.degenerate,
    )
    return rep


def track_rows(cfg: RunConfig, strict: bool = True) -> list[dict]:
    """One row per (grid point, track) of a sweep of U^(N)."""
    n = cfg.n_qubits
    steps = cfg.steps_per_cycle
    spec = anholonomic_family(n)
    labels = {}

    def observe(k, lam, vectors):
        lam_ref = cfg.lambda0 + TWO_PI * (k % steps) / steps
        labels[k] = label_vectors(vectors, eigenbasis(n, lam_ref))

    flow = sweep(spec, steps, cfg.cycles, cfg.lambda0, strict=strict, observer=observe)
    rows = []
    for k, lam in enumerate(flow.grid):
        for t in range(flow.dim):
            rows.append(
                {
                    "step": k,
                    "lambda": float(lam),
                    "track_id": t,
                    "eigenangle_unwrapped": float(flow.angles[k, t]),
                    "analytic_m": int(labels[k][t]),
                    "match_quality": float(flow.quality[k, t]),
                }
            )
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def cmd_track(cfg: RunConfig) -> str:
    rows = track_rows(cfg)
    if cfg.format == "csv":
        return rows_to_csv(rows)
    return json.dumps({"schema": SCHEMA, "columns": list(CSV_COLUMNS), "rows": rows}) + "\n"


COMMAND_FUNCS = {
    "spectrum": cmd_spectrum,
    "holonomy": cmd_holonomy,
    "verify": cmd_verify,
    "negative-control": cmd_negative_control,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="anholonomy",
        description="Eigenvalue/eigenspace anholonomy of recursively built N-qubit circuits.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--qubits", type=int, default=1, help="number of qubits N (1..10)")
    p.add_argument("--steps", type=int, default=512, help="grid steps per 2pi cycle (>= 64)")
    p.add_argument("--cycles", type=int, default=1, help="number of 2pi cycles to sweep")
    p.add_argument("--lambda0", type=float, default=0.0, help="cycle base point")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--fd-step", type=float, default=1e-5, help="finite-difference step for the connection")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp (byte-stable output)")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        n_qubits=args.qubits,
        steps_per_cycle=args.steps,
        cycles=args.cycles,
        lambda0=args.lambda0,
        out_path=args.out,
        format=args.format,
        fd_step=args.fd_step,
        timestamp=not args.no_timestamp,
    )


def _emit(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args).validate()
    except ConfigError as exc:
        print(f"anholonomy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if cfg.command == "track":
            _emit(cmd_track(cfg), cfg.out_path)
            return EXIT_PASS
        rep = COMMAND_FUNCS[cfg.command](cfg)
    except OutOfRange as exc:
        print(f"anholonomy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    _emit(rep.to_csv() if cfg.format == "csv" else rep.to_json(), cfg.out_path)
    for name, v in rep.verdicts.items():
        if not v["pass"]:
            print(f"FAIL {name}: value={v['value']} tol={v['tol']}", file=sys.stderr)
    return EXIT_PASS if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
