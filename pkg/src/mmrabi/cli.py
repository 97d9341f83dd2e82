"""Command-line front end: subcommand dispatch and deterministic output.

Every subcommand reads an optional flat config file, writes CSV
artifacts plus a ``summary.json`` into the output directory, and prints
the summary path.  Floating-point values in JSON are serialized with 17
significant digits so identical config and seed give byte-identical
summaries.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure (a diagnostic JSON is still written when possible).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .circuitmap import effective_couplings, validate_regime
from .config import ExperimentConfig, default_config, load_config, schema_lines
from .dynamics import (
    ScheduledHamiltonian,
    catch_release,
    evolve_lindblad,
    evolve_schrodinger,
    fidelity,
    make_catch_release_schedule,
    make_w_generation_schedule,
    photon_ledger_defect,
)
from .errors import ConfigError, MMRabiError
from .hilbert import EVEN, ODD, UP, BasisState, basis_csv_lines, enumerate_basis
from .operators import build_hamiltonian
from .solutions import (
    dark_state_2q,
    dark_state_2q_odd,
    dark_state_3q,
    find_one_photon_solutions,
    verify_eigenstate,
)
from .spectra import eigenspectrum, sweep_coupling


# --------------------------------------------------------------------------
# deterministic serialization


def _json_fragment(obj, indent: int) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        body = ",\n".join(
            f'{pad}  "{k}": {_json_fragment(v, indent + 1)}' for k, v in items
        )
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(np.asarray(obj).tolist()) if isinstance(obj, np.ndarray) else list(obj)
        if not seq:
            return "[]"
        body = ",\n".join(f"{pad}  {_json_fragment(v, indent + 1)}" for v in seq)
        return "[\n" + body + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return "true" if obj is True else "false" if obj is False else "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    if isinstance(obj, complex):
        return f'"{obj.real:.17g}{obj.imag:+.17g}j"'
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_json(obj) -> str:
    return _json_fragment(obj, 0) + "\n"


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _write_csv(path: Path, header, rows):
    lines = [header]
    for row in rows:
        lines.append(",".join(format(float(v), ".17g") for v in row))
    _write(path, "\n".join(lines) + "\n")


def _write_trajectory_csv(path: Path, traj):
    names = sorted(traj.observables)
    header = "t," + ",".join(names)
    rows = (
        [traj.times[k]] + [traj.observables[n][k] for n in names]
        for k in range(len(traj.times))
    )
    _write_csv(path, header, rows)


# --------------------------------------------------------------------------
# shared builders


def _vacuum_up_state(space) -> np.ndarray:
    dims = space.dims
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.index(BasisState((0,) * dims.M, (UP,) * dims.N))] = 1.0
    return psi


def _generation_schedule(cfg: ExperimentConfig):
    return make_w_generation_schedule(
        M=cfg["dims.M"],
        T=cfg["schedule.T"],
        g_max=cfg["schedule.g_max"],
        delta_split_initial=cfg["schedule.delta_split"],
        weights=cfg.schedule_weights(),
        split_hold_fraction=cfg["schedule.split_hold_fraction"],
        g_ramp_fraction=cfg["schedule.g_ramp_fraction"],
    )


def _require_two_qubits(cfg: ExperimentConfig):
    if cfg["dims.N"] != 2:
        raise ConfigError(
            f"the W-state protocol uses exactly two qubits, config has dims.N = {cfg['dims.N']}"
        )


# --------------------------------------------------------------------------
# subcommands (each returns the summary dict)


def cmd_basis(cfg: ExperimentConfig, out: Path) -> dict:
    space = enumerate_basis(cfg.dims())
    _write(out / "basis.csv", "\n".join(basis_csv_lines(space)) + "\n")
    even = enumerate_basis(cfg.dims(), EVEN)
    odd = enumerate_basis(cfg.dims(), ODD)
    return {
        "dim": space.dim,
        "n_photon_states": space.dims.n_photon_states,
        "even_dim": even.dim,
        "odd_dim": odd.dim,
    }


def cmd_spectrum(cfg: ExperimentConfig, out: Path) -> dict:
    params = cfg.rabi_params()
    n_levels = cfg["sweep.n_levels"]
    rows = []
    summary = {}
    for sector in (EVEN, ODD):
        space = enumerate_basis(cfg.dims(), sector)
        k = min(n_levels, space.dim)
        energies = eigenspectrum(build_hamiltonian(params, space), k, vectors=False)
        rows.extend([sector.sign, i, e] for i, e in enumerate(energies))
        name = "even" if sector is EVEN else "odd"
        summary[f"{name}_levels"] = list(energies)
    _write_csv(out / "spectrum.csv", "parity,level_index,energy", rows)
    return summary


def cmd_sweep(cfg: ExperimentConfig, out: Path) -> dict:
    pattern = cfg.rabi_params()
    grid = cfg.sweep_grid()

    def template(g):
        # grid values scale the configured coupling pattern
        return cfg.rabi_params(g_scale=g)

    table = sweep_coupling(template, grid, cfg.parity("sweep.parity"),
                           cfg["sweep.n_levels"], cfg.dims())
    _write(out / "sweep.csv", "\n".join(table.csv_lines()) + "\n")
    omega = float(pattern.omega[0])
    summary = {"n_points": len(grid), "g_min": grid[0], "g_max": grid[-1]}
    for sign, lv in table.levels.items():
        name = "even" if sign > 0 else "odd"
        summary[f"{name}_min_distance_to_omega"] = float(np.abs(lv - omega).min(axis=1).max())
    return summary


def _dark_state_for(cfg: ExperimentConfig, space):
    params = cfg.rabi_params()
    N = cfg["dims.N"]
    parity = cfg["solve.parity"]
    if N == 2 and parity == "even":
        return "two-qubit even", dark_state_2q(params, space)
    if N == 2:
        return "two-qubit odd (variant a)", dark_state_2q_odd(params, space, variant="a")
    if N == 3:
        return "three-qubit odd", dark_state_3q(params, space)
    raise ConfigError(
        f"dark-verify supports dims.N = 2 or 3 directly, got {N}; "
        "build product states through the library API"
    )


def cmd_dark_verify(cfg: ExperimentConfig, out: Path) -> dict:
    space = enumerate_basis(cfg.dims())
    family, state = _dark_state_for(cfg, space)
    H = build_hamiltonian(cfg.rabi_params(), space)
    residual = verify_eigenstate(H, state.vector, state.energy)
    nz = np.flatnonzero(np.abs(state.vector) > 1e-14)
    rows = [[i, state.vector[i].real, state.vector[i].imag] for i in nz]
    _write_csv(out / "dark_state.csv", "basis_index,amplitude_re,amplitude_im", rows)
    return {
        "family": family,
        "energy": state.energy,
        "residual": residual,
        "conditions": list(state.conditions),
        "max_photon_support": state.max_photon_support(),
    }


def cmd_solve_one_photon(cfg: ExperimentConfig, out: Path) -> dict:
    parity = EVEN if cfg["solve.parity"] == "even" else ODD
    report = find_one_photon_solutions(cfg.rabi_params(), parity, tol=cfg["solve.tol"])
    rows = []
    for k, (E, v) in enumerate(report.found):
        for i in np.flatnonzero(np.abs(v) > 1e-14):
            rows.append([k, E, i, v[i].real, v[i].imag])
    _write_csv(
        out / "one_photon_solutions.csv",
        "solution,energy,basis_index,amplitude_re,amplitude_im",
        rows,
    )
    return {
        "n_found": len(report.found),
        "energies": [E for E, _ in report.found],
        "O1_nullity": report.rank_data["O1_nullity"],
    }


def cmd_adiabatic(cfg: ExperimentConfig, out: Path) -> dict:
    _require_two_qubits(cfg)
    space = enumerate_basis(cfg.dims())
    sched = _generation_schedule(cfg)
    ht = ScheduledHamiltonian(space, sched)
    traj = evolve_schrodinger(
        ht,
        _vacuum_up_state(space),
        rtol=cfg["solver.rtol"],
        atol=cfg["solver.atol"],
        n_samples=cfg["solver.n_samples"],
    )
    target = dark_state_2q(ht.params_at(sched.duration), space)
    F = fidelity(traj.final_state, target.vector)
    _write_trajectory_csv(out / "adiabatic.csv", traj)
    return {
        "T": sched.duration,
        "fidelity": F,
        "n_max": cfg["dims.n_max"],
        "final_norm": float(traj.observables["norm"][-1]),
        "final_parity": float(traj.observables["parity"][-1]),
    }


def cmd_lindblad(cfg: ExperimentConfig, out: Path) -> dict:
    _require_two_qubits(cfg)
    space = enumerate_basis(cfg.dims())
    sched = _generation_schedule(cfg)
    ht = ScheduledHamiltonian(space, sched)
    psi0 = _vacuum_up_state(space)
    rho0 = np.outer(psi0, psi0.conj())
    traj = evolve_lindblad(
        ht,
        cfg.noise_model(),
        rho0,
        rtol=cfg["solver.rtol"],
        atol=cfg["solver.atol"],
        n_samples=cfg["solver.n_samples"],
    )
    target = dark_state_2q(ht.params_at(sched.duration), space)
    _write_trajectory_csv(out / "lindblad.csv", traj)
    return {
        "T": sched.duration,
        "fidelity": fidelity(traj.final_state, target.vector),
        "final_trace": float(traj.observables["trace"][-1]),
        "final_purity": float(traj.observables["purity"][-1]),
        "photon_ledger_defect": photon_ledger_defect(traj),
    }


def cmd_catch_release(cfg: ExperimentConfig, out: Path) -> dict:
    _require_two_qubits(cfg)
    space = enumerate_basis(cfg.dims())
    T_gen = cfg["schedule.T"]
    sched = make_catch_release_schedule(
        M=cfg["dims.M"],
        T_gen=T_gen,
        hold_time=cfg["schedule.hold_time"],
        release=cfg.release_config(),
        g_max=cfg["schedule.g_max"],
        delta_split_initial=cfg["schedule.delta_split"],
        weights=cfg.schedule_weights(),
        split_hold_fraction=cfg["schedule.split_hold_fraction"],
        g_ramp_fraction=cfg["schedule.g_ramp_fraction"],
    )
    psi0 = _vacuum_up_state(space)
    rho0 = np.outer(psi0, psi0.conj())
    traj, report = catch_release(
        space,
        cfg.noise_model(),
        sched,
        rho0,
        rtol=cfg["solver.rtol"],
        n_samples=cfg["solver.n_samples"],
    )
    ht = ScheduledHamiltonian(space, sched)
    target = dark_state_2q(ht.params_at(T_gen), space)
    k_gen = int(np.argmin(np.abs(traj.times - T_gen)))
    _write_trajectory_csv(out / "catch_release.csv", traj)
    total = report.total_emitted
    shares = {
        str(i): (e / total if total > 0 else 0.0) for i, e in report.emitted_per_line.items()
    }
    return {
        "T_gen": T_gen,
        "generation_fidelity": fidelity(traj.states[k_gen], target.vector),
        "emitted_per_line": {str(i): e for i, e in report.emitted_per_line.items()},
        "emitted_shares": shares,
        "total_emitted": total,
    }


def cmd_circuit_map(cfg: ExperimentConfig, out: Path) -> dict:
    circuit = cfg.circuit_params()
    eff = effective_couplings(circuit)
    regime = validate_regime(circuit)
    return {
        "omega_q": list(eff.omega_q),
        "omega_r": list(eff.omega_r),
        "g0": list(eff.g0),
        "g1": list(eff.g1),
        "rabi_couplings": list(eff.rabi_couplings),
        "coupling_matrix": [list(row) for row in eff.coupling_matrix()],
        "regime_charge_ratio": list(regime.charge_ratio),
        "regime_ac_dc_ratio": list(regime.ac_dc_ratio),
        "regime_warnings": list(regime.warnings),
    }


# --------------------------------------------------------------------------
# figure presets


FIGURE_PRESETS = {
    # even-sector horizontal line at E = omega under the dark-state conditions
    "fig1a": {
        "dims.M": 2, "dims.N": 2, "dims.n_max": 6,
        "params.delta": (0.9, 0.1), "params.g": (1.0,),
        "sweep.g_min": 0.0, "sweep.g_max": 1.0, "sweep.n_points": 50,
        "sweep.n_levels": 14, "sweep.parity": "both",
    },
    # odd-sector line for three qubits with g_i1 = g_i2 + g_i3
    "fig1b": {
        "dims.M": 2, "dims.N": 3, "dims.n_max": 6,
        "params.delta": (1.0, 1.0, 1.0),
        "params.g": (1.0, 0.6, 0.4, 1.0, 0.6, 0.4),
        "sweep.g_min": 0.02, "sweep.g_max": 1.0, "sweep.n_points": 50,
        "sweep.n_levels": 14, "sweep.parity": "odd",
        "solve.parity": "odd",
    },
    # closed-system two-mode W/Bell generation at T = 100
    "fig2": {
        "dims.M": 2, "dims.N": 2, "dims.n_max": 6,
        "schedule.T": 100.0,
    },
    # open-system three-mode generation and release, uniform weights
    "fig4": {
        "dims.M": 3, "dims.N": 2, "dims.n_max": 3,
        "schedule.T": 100.0, "schedule.hold_time": 5.0,
        "release.delays": (0.0, 0.0, 0.0), "release.duration": 80.0,
        "solver.rtol": 1e-8, "solver.n_samples": 201,
    },
    # perfect-W weights (1, 1, sqrt(2)); line 3 carries half the photon
    "fig5": {
        "dims.M": 3, "dims.N": 2, "dims.n_max": 3,
        "schedule.T": 100.0, "schedule.hold_time": 5.0,
        "schedule.weights": (1.0, 1.0, float(np.sqrt(2.0))),
        "release.delays": (5.0, 5.0, 0.0), "release.duration": 80.0,
        "solver.rtol": 1e-8, "solver.n_samples": 201,
    },
}

FIGURE_COMMANDS = {
    "fig1a": cmd_sweep,
    "fig1b": cmd_sweep,
    "fig2": cmd_adiabatic,
    "fig4": cmd_catch_release,
    "fig5": cmd_catch_release,
}


def cmd_reproduce(cfg: ExperimentConfig, out: Path, figure: str) -> dict:
    cfg = cfg.with_overrides(FIGURE_PRESETS[figure])
    summary = FIGURE_COMMANDS[figure](cfg, out)
    summary["figure"] = figure
    if figure == "fig1b":
        space = enumerate_basis(cfg.dims())
        state = dark_state_3q(cfg.rabi_params(), space)
        H = build_hamiltonian(cfg.rabi_params(), space)
        summary["dark_state_residual"] = verify_eigenstate(H, state.vector, state.energy)
    return summary


# --------------------------------------------------------------------------
# dispatch


COMMANDS = {
    "basis": cmd_basis,
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "dark-verify": cmd_dark_verify,
    "solve-one-photon": cmd_solve_one_photon,
    "adiabatic": cmd_adiabatic,
    "lindblad": cmd_lindblad,
    "catch-release": cmd_catch_release,
    "circuit-map": cmd_circuit_map,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmrabi",
        description="Multiqubit multimode Rabi model: spectra, dark states, protocols.",
    )
    parser.add_argument("--config", type=Path, help="flat key = value config file")
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    parser.add_argument("--seed", type=int, help="seed recorded in the summary")
    parser.add_argument("--cutoff", type=int, help="override dims.n_max")
    parser.add_argument("--quiet", action="store_true", help="suppress status lines")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name)
    rep = sub.add_parser("reproduce")
    rep.add_argument("figure", choices=sorted(FIGURE_PRESETS))
    sub.add_parser("schema")
    return parser


def _apply_thread_cap():
    cap = os.environ.get("RABI_MM_THREADS")
    if not cap:
        return
    # best effort: BLAS pools honor these when not already initialized
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, cap)
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(int(cap))
    except (ImportError, ValueError):
        pass


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _apply_thread_cap()
    out = args.out
    try:
        if args.command == "schema":
            text = "\n".join(schema_lines()) + "\n"
            sys.stdout.write(text)
            return 0
        cfg = load_config(args.config) if args.config else default_config()
        overrides = {}
        if args.cutoff is not None:
            overrides["dims.n_max"] = args.cutoff
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            cfg = cfg.with_overrides(overrides)
        if args.command == "reproduce":
            summary = cmd_reproduce(cfg, out, args.figure)
        else:
            summary = COMMANDS[args.command](cfg, out)
        summary["seed"] = cfg["seed"]
        summary["command"] = args.command
        path = out / "summary.json"
        _write(path, format_json(summary))
        if not args.quiet:
            print(path)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (MMRabiError, np.linalg.LinAlgError) as exc:
        diagnostic = {"error": type(exc).__name__, "message": str(exc)}
        try:
            _write(out / "error.json", format_json(diagnostic))
        except OSError:
            pass
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
