"""Command-line entry point: config parsing, dispatch, and serialization.

Commands: verify, evolve, dispersive-compare, weights, sweep, spectrum.
Configs are flat key = value text with dotted keys for the initial state;
outputs are CSV (time series, spectra, weight tables), JSON (structured
summaries), and SVG (diagrams), all byte-deterministic for a fixed config.
Exit codes: 0 success, 1 check failure, 2 config error, 3 truncation-unsafe
run.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .hilbert import SpaceSpec
from .operators import verify_algebra
from .hamiltonian import (
    LAMBDA,
    VEE,
    SCHEMES,
    HamiltonianSpec,
    build_hamiltonian,
    dark_state,
    excitation_operator,
    interaction_hamiltonian,
    rotation_parameters,
    rotation_report,
)
from .dispersive import analytic_effective, dispersive_params, residual_and_order
from .dynamics import (
    InitialState,
    TimeGrid,
    TrajectoryRecord,
    TruncationError,
    evolve,
    semiclassical_sweep,
)
from .hamiltonian import free_hamiltonian
from .dynamics import prepare_initial
from .weights import diagram_layout, render_svg, weight_table

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_TRUNCATION = 3

DEFAULT_VERIFY_GUARD = 2
DEFAULT_DISPERSIVE_GUARD = 3
DEFAULT_SWEEP_NBARS = (4.0, 8.0, 16.0, 32.0)

KNOWN_KEYS = {
    "scheme", "atoms", "n_max", "omega", "E1", "E2", "E3",
    "g31", "g32", "g21", "classical_alpha", "t_max", "n_samples",
    "initial.atom", "initial.field", "guard", "out", "sweep.n_bar",
}


class ConfigError(ValueError):
    """Config parse or validation failure; the message names the key."""


@dataclass
class RunConfig:
    """Validated run parameters aggregated from one config document."""

    scheme: str
    atoms: int
    n_max: int
    omega: float
    energies: tuple[float, float, float]
    g31: float = 0.0
    g32: float = 0.0
    g21: float = 0.0
    classical_alpha: complex | None = None
    t_max: float | None = None
    n_samples: int | None = None
    initial_atom: str | None = None
    initial_field: str | None = None
    guard: int | None = None
    out_dir: str | None = None
    n_bars: tuple[float, ...] | None = None

    def space_spec(self) -> SpaceSpec:
        return SpaceSpec(self.atoms, self.n_max)

    def hamiltonian_spec(self) -> HamiltonianSpec:
        return HamiltonianSpec(
            scheme=self.scheme, energies=self.energies, omega=self.omega,
            g31=self.g31, g32=self.g32, g21=self.g21,
        )

    def initial_state(self) -> InitialState:
        if self.initial_atom is None:
            raise ConfigError("initial.atom: required for this command")
        if self.initial_field is None:
            raise ConfigError("initial.field: required for this command")
        atomic: str | tuple[int, int, int]
        if self.initial_atom in ("dark", "bright"):
            atomic = self.initial_atom
        else:
            try:
                parts = tuple(int(v.strip()) for v in self.initial_atom.split(","))
            except ValueError:
                raise ConfigError(
                    f"initial.atom: expected a triple like 1,0,0 or 'dark', got "
                    f"{self.initial_atom!r}"
                ) from None
            if len(parts) != 3:
                raise ConfigError("initial.atom: occupation must have three entries")
            atomic = parts  # type: ignore[assignment]
        kind, _, raw = self.initial_field.partition(":")
        if kind not in ("fock", "coherent") or not raw:
            raise ConfigError(
                f"initial.field: expected fock:<n> or coherent:<alpha>, got "
                f"{self.initial_field!r}"
            )
        try:
            value = complex(raw) if kind == "coherent" else complex(int(raw))
        except ValueError:
            raise ConfigError(f"initial.field: cannot parse value {raw!r}") from None
        return InitialState(atomic, (kind, value))

    def time_grid(self) -> TimeGrid:
        if self.t_max is None:
            raise ConfigError("t_max: required for this command")
        if self.n_samples is None:
            raise ConfigError("n_samples: required for this command")
        return TimeGrid(self.t_max, self.n_samples)

    def mean_photon_number(self) -> float:
        kind, value = self.initial_state().field
        return abs(value) ** 2 if kind == "coherent" else float(value.real)


def _parse_scalar(key: str, raw: str, kind):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind.__name__}") from None


def parse_config(text: str) -> RunConfig:
    """Parse a flat key = value document into a validated RunConfig."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{key}: unknown key")
        if key in values:
            raise ConfigError(f"{key}: duplicate key")
        values[key] = raw

    for required in ("scheme", "atoms", "n_max", "omega", "E1", "E2", "E3"):
        if required not in values:
            raise ConfigError(f"{required}: missing required key")

    scheme = values["scheme"].lower()
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme: must be 'lambda' or 'vee', got {values['scheme']!r}")

    atoms = _parse_scalar("atoms", values["atoms"], int)
    n_max = _parse_scalar("n_max", values["n_max"], int)
    if atoms < 1:
        raise ConfigError("atoms: must be >= 1")
    if n_max < 1:
        raise ConfigError("n_max: must be >= 1")

    energies = tuple(_parse_scalar(k, values[k], float) for k in ("E1", "E2", "E3"))
    if not (energies[0] <= energies[1] <= energies[2]):
        raise ConfigError("E2: energies must be ordered E1 <= E2 <= E3")

    couplings = {}
    for name in ("g31", "g32", "g21"):
        couplings[name] = _parse_scalar(name, values[name], float) if name in values else 0.0
    required_couplings = ("g31", "g32") if scheme == LAMBDA else ("g31", "g21")
    for name in required_couplings:
        if name not in values:
            raise ConfigError(f"{name}: required for scheme '{scheme}'")
        if couplings[name] <= 0:
            raise ConfigError(f"{name}: must be > 0")

    n_bars = None
    if "sweep.n_bar" in values:
        try:
            n_bars = tuple(float(v.strip()) for v in values["sweep.n_bar"].split(","))
        except ValueError:
            raise ConfigError(
                f"sweep.n_bar: expected comma-separated numbers, got "
                f"{values['sweep.n_bar']!r}"
            ) from None
        if any(nb < 0 for nb in n_bars):
            raise ConfigError("sweep.n_bar: values must be >= 0")

    guard = _parse_scalar("guard", values["guard"], int) if "guard" in values else None
    if guard is not None and guard < 0:
        raise ConfigError("guard: must be >= 0")

    return RunConfig(
        scheme=scheme,
        atoms=atoms,
        n_max=n_max,
        omega=_parse_scalar("omega", values["omega"], float),
        energies=energies,  # type: ignore[arg-type]
        g31=couplings["g31"],
        g32=couplings["g32"],
        g21=couplings["g21"],
        classical_alpha=(
            _parse_scalar("classical_alpha", values["classical_alpha"], complex)
            if "classical_alpha" in values else None
        ),
        t_max=_parse_scalar("t_max", values["t_max"], float) if "t_max" in values else None,
        n_samples=(
            _parse_scalar("n_samples", values["n_samples"], int)
            if "n_samples" in values else None
        ),
        initial_atom=values.get("initial.atom"),
        initial_field=values.get("initial.field"),
        guard=guard,
        out_dir=values.get("out"),
        n_bars=n_bars,
    )


def _dump_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _fmt(value: float) -> str:
    return repr(float(value))


def write_trajectory_csv(path: Path, record: TrajectoryRecord) -> None:
    lines = ["t,pop1,pop2,pop3,n_photon,norm,excitation,leakage"]
    for k in range(len(record.times)):
        lines.append(",".join([
            _fmt(record.times[k]), _fmt(record.pop1[k]), _fmt(record.pop2[k]),
            _fmt(record.pop3[k]), _fmt(record.n_photon[k]), _fmt(record.norm[k]),
            _fmt(record.excitation[k]), _fmt(record.leakage[k]),
        ]))
    path.write_text("\n".join(lines) + "\n")


def _check(name: str, residual: float | None, tolerance: float,
           passed: bool) -> dict:
    return {
        "name": name,
        "residual": None if residual is None else float(residual),
        "tolerance": tolerance,
        "passed": bool(passed),
    }


def cmd_verify(cfg: RunConfig, out: Path) -> int:
    spec = cfg.space_spec()
    h = cfg.hamiltonian_spec()
    guard = cfg.guard if cfg.guard is not None else DEFAULT_VERIFY_GUARD
    checks = []
    for report in verify_algebra(spec, "u3"):
        checks.append(_check(report.name, report.residual, report.tolerance,
                             report.passed))
    for report in verify_algebra(spec, "second_order", guard=guard):
        checks.append(_check(f"{report.name} (guard={guard})", report.residual,
                             report.tolerance, report.passed))

    r = rotation_parameters(h)
    if r.degenerate:
        rep = rotation_report(spec, h)
        checks.append(_check("dark-mode decoupling after rotation",
                             rep.dark_coupling_residual, 1e-10,
                             rep.dark_coupling_residual <= 1e-10))
        coupling_err = abs(rep.extracted_coupling - rep.expected_coupling)
        checks.append(_check("bright coupling equals root-sum-square",
                             coupling_err, 1e-10, coupling_err <= 1e-10))
        h_int = interaction_hamiltonian(spec, h)
        worst = max(
            float(np.linalg.norm(h_int.mat @ dark_state(spec, h, n)))
            for n in range(spec.n_max)
        )
        checks.append(_check("dark state annihilated by the interaction",
                             worst, 1e-12, worst <= 1e-12))
    else:
        checks.append(_check(
            "dark-mode decoupling after rotation (skipped: non-degenerate "
            "pair energies)", None, 1e-10, True))

    overall = all(c["passed"] for c in checks)
    _dump_json(out / "report.json", {
        "command": "verify",
        "checks": checks,
        "overall_pass": overall,
    })
    failed = [c for c in checks if not c["passed"]]
    print(f"verify: {len(checks) - len(failed)}/{len(checks)} checks passed")
    for c in failed:
        print(f"  FAIL {c['name']}: residual {c['residual']:.3e} > {c['tolerance']:.0e}")
    return EXIT_OK if overall else EXIT_CHECK_FAILURE


def cmd_evolve(cfg: RunConfig, out: Path) -> int:
    spec = cfg.space_spec()
    h = cfg.hamiltonian_spec()
    record = evolve(
        build_hamiltonian(spec, h),
        prepare_initial(spec, cfg.initial_state(), h),
        cfg.time_grid(),
        excitation_operator(spec, h.scheme),
    )
    write_trajectory_csv(out / "trajectory.csv", record)
    print(f"evolve: wrote {out / 'trajectory.csv'} "
          f"({'ok' if record.truncation_safe else 'TRUNCATION-UNSAFE'})")
    return EXIT_OK if record.truncation_safe else EXIT_TRUNCATION


def cmd_dispersive_compare(cfg: RunConfig, out: Path) -> int:
    spec = cfg.space_spec()
    h = cfg.hamiltonian_spec()
    guard = cfg.guard if cfg.guard is not None else DEFAULT_DISPERSIVE_GUARD
    p = dispersive_params(h, cfg.mean_photon_number(), spec.atoms)
    residual, order = residual_and_order(spec, h, p, guard)

    init = cfg.initial_state()
    grid = cfg.time_grid()
    n_exc = excitation_operator(spec, h.scheme)
    psi0 = prepare_initial(spec, init, h)
    exact = evolve(build_hamiltonian(spec, h), psi0, grid, n_exc)
    model = analytic_effective(spec, h, p)
    effective_ham = free_hamiltonian(spec, h) + model.matrix()
    effective = evolve(effective_ham, psi0, grid, n_exc)
    write_trajectory_csv(out / "dispersive_exact.csv", exact)
    write_trajectory_csv(out / "dispersive_effective.csv", effective)

    deviation = max(
        float(np.max(np.abs(exact.population(l) - effective.population(l))))
        for l in (1, 2, 3)
    )
    _dump_json(out / "dispersive.json", {
        "command": "dispersive-compare",
        "scheme": h.scheme,
        "guard": guard,
        "small_params": {f"eps{i}{j}": eps for (i, j), eps in p.small_params.items()},
        "prefactor": model.prefactor,
        "validity_margin": p.validity_margin,
        "block_residual": residual,
        "order_estimate": order if math.isfinite(order) else None,
        "max_population_deviation": deviation,
    })
    print(f"dispersive-compare: block residual {residual:.3e}, order {order:.2f}")
    safe = exact.truncation_safe and effective.truncation_safe
    return EXIT_OK if safe else EXIT_TRUNCATION


def cmd_weights(cfg: RunConfig, out: Path) -> int:
    spec = cfg.space_spec()
    classical = cfg.classical_alpha is not None
    alpha = cfg.classical_alpha if classical else 1.0
    layout = diagram_layout(cfg.scheme, classical, spec, alpha=alpha)
    (out / "weights.csv").write_text(weight_table(layout))
    (out / "weights.svg").write_bytes(render_svg(layout))
    print(f"weights: wrote {out / 'weights.csv'} and {out / 'weights.svg'}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    h = cfg.hamiltonian_spec()
    n_bars = list(cfg.n_bars) if cfg.n_bars else list(DEFAULT_SWEEP_NBARS)
    specs = [
        SpaceSpec(cfg.atoms, max(2, math.ceil(nb + 8.0 * math.sqrt(nb)) + 4))
        for nb in n_bars
    ]
    result = semiclassical_sweep(specs, h, n_bars)
    _dump_json(out / "sweep.json", {
        "command": "sweep",
        "rows": [asdict(row) for row in result.rows],
        "slope": result.slope,
    })
    slope = "n/a" if result.slope is None else f"{result.slope:.3f}"
    print(f"sweep: {len(result.rows)} points, log-log slope {slope}")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, out: Path) -> int:
    spec = cfg.space_spec()
    ham = build_hamiltonian(spec, cfg.hamiltonian_spec())
    eigenvalues = np.linalg.eigvalsh(ham.mat)
    lines = ["index,eigenvalue"]
    lines.extend(f"{k},{_fmt(v)}" for k, v in enumerate(eigenvalues))
    (out / "spectrum.csv").write_text("\n".join(lines) + "\n")
    print(f"spectrum: wrote {out / 'spectrum.csv'} ({len(eigenvalues)} eigenvalues)")
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "evolve": cmd_evolve,
    "dispersive-compare": cmd_dispersive_compare,
    "weights": cmd_weights,
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
}


def run(command: str, cfg: RunConfig) -> int:
    """Dispatch one command; returns the process exit status."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    out = Path(cfg.out_dir or "out")
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    status = COMMANDS[command](cfg, out)
    print(f"{command}: done in {time.perf_counter() - started:.2f}s")
    return status


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="trilevel",
        description="Collective three-level atoms coupled to a quantized field mode",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="path to a key = value config file")
        cmd.add_argument("--out", default=None, help="output directory (default: out)")
        cmd.add_argument("--guard", type=int, default=None,
                         help="photon guard band override")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    try:
        cfg = parse_config(text)
        if args.out is not None:
            cfg.out_dir = args.out
        if args.guard is not None:
            cfg.guard = args.guard
        return run(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except TruncationError as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
