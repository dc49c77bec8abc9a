"""``jchsim`` command line front end.

Usage::

    jchsim <command> --config <path> [--out <dir>] [--seed <u64>]

Commands: dynamics, sweep, eigen, variances, spectrum, fit. Exit status is
0 on success, 2 on configuration or input-file errors and 3 on numerical
failures.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, units
from .config import EXPERIMENTS, ConfigError, load_config
from .fockspace import (
    BasisError,
    CouplingKind,
    StateVector,
    TruncationConfig,
    build_basis,
    fidelity,
)
from .model import TrapConfig, collective_mode_frequencies, hopping_rate, number_operators
from .observables import (
    adiabatic_leakage_estimate,
    collective_occupations,
    estimated_phonon_variance,
    expectation,
    ground_state_leakage,
    instantaneous_spectrum,
    variance_report,
)
from .propagate import NoiseModel, StepTooLargeError, evolve, evolve_noisy
from .protocol import (
    TRACK_NAMES,
    DynamicsParams,
    SweepParams,
    dynamics_schedule,
    reference_tracks,
    state_atI,
    state_phSF,
    sweep_schedule,
)
from .spectroscopy import (
    Probe,
    SpectrumFileError,
    default_detunings,
    fit_sideband_spectrum,
    match_peaks,
    nbar_from_ratio,
    read_spectrum_csv,
    sideband_spectrum,
)

log = logging.getLogger("jchsim")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class NumericFailure(RuntimeError):
    pass


# --- output -----------------------------------------------------------------------


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(format(float(value), ".12g"))
    return str(value)


class Writer:
    """Writes column tables with a metadata preamble in the configured format."""

    def __init__(self, cfg, command, out_dir):
        self.cfg = cfg
        self.out_dir = Path(out_dir)
        self.meta = {
            "command": command,
            "jchsim_version": __version__,
            "config_sha256": cfg.digest(),
            "seed": cfg["noise.seed"],
        }
        self.written = []

    def table(self, stem, columns):
        """``columns`` is an ordered mapping name -> sequence of equal length."""
        names = list(columns)
        n_rows = {len(columns[k]) for k in names}
        if len(n_rows) != 1:
            raise ValueError(f"ragged columns in {stem}")
        self.out_dir.mkdir(parents=True, exist_ok=True)
        fmt = self.cfg["output.format"]
        path = self.out_dir / f"{stem}.{fmt}"
        if fmt == "csv":
            lines = [f"# {k}: {v}" for k, v in self.meta.items()]
            lines.append(",".join(names))
            for row in zip(*(columns[k] for k in names)):
                lines.append(",".join(_fmt(v) for v in row))
            text = "\n".join(lines) + "\n"
        else:
            doc = {
                "metadata": self.meta,
                "columns": {k: [_json_value(v) for v in columns[k]] for k in names},
            }
            text = json.dumps(doc, indent=1) + "\n"
        path.write_text(text)
        self.written.append(path)
        return path


# --- shared setup -----------------------------------------------------------------


def _trap(cfg):
    return TrapConfig(omega_x=cfg.omega("trap.omega_x_mhz"), omega_z=cfg.omega("trap.omega_z_mhz"))


def _kappa(cfg):
    if cfg["pulse.kappa_khz"] == "trap":
        return hopping_rate(_trap(cfg))
    return cfg.omega("pulse.kappa_khz")


def _basis(cfg, kind):
    n_max = cfg["numerics.n_max"]
    sector = 2 if cfg["numerics.sector"] else None
    return build_basis(TruncationConfig(n_max=n_max, sector=sector, kind=kind))


def _sweep(cfg):
    params = SweepParams(
        delta_start=cfg.omega("pulse.delta_start_khz"),
        delta_end=cfg.omega("pulse.delta_end_khz"),
        duration=cfg.seconds("pulse.duration_us"),
        g_peak=0.5 * cfg.omega("pulse.two_g_peak_khz"),
        edge_factor=cfg["pulse.edge_factor"],
        kappa=_kappa(cfg),
    )
    return sweep_schedule(params, n_samples=cfg["pulse.samples"])


def _t_us(times):
    return [units.to_us(t) for t in times]


# --- commands -----------------------------------------------------------------------


def cmd_dynamics(cfg, writer):
    params = DynamicsParams(
        g=0.5 * cfg.omega("pulse.two_g_khz"),
        kappa=_kappa(cfg),
        duration=cfg.seconds("pulse.duration_us"),
        detuning=cfg.omega("pulse.detuning_khz"),
    )
    schedule = dynamics_schedule(params, n_samples=cfg["pulse.samples"])
    basis = _basis(cfg, CouplingKind.ANTI_JC)
    psi0 = StateVector.basis_state(basis, (0, 0, 0, 0))
    noise = NoiseModel(
        sigma_detuning=cfg.omega("noise.sigma_hz"),
        n_trajectories=cfg["noise.trajectories"],
        seed=cfg["noise.seed"],
    )
    traj = evolve_noisy(schedule, psi0, noise, cfg.seconds("numerics.step_us"))
    scale = cfg["report.detection_scale"]
    writer.table("dynamics", {
        "t_us": _t_us(traj.times),
        "pe_ion1": scale * traj.records["pe_ion1"],
        "pe_ion2": scale * traj.records["pe_ion2"],
    })


def cmd_sweep(cfg, writer):
    schedule = _sweep(cfg)
    basis = _basis(cfg, CouplingKind.JC)
    traj = evolve(schedule, state_atI(basis), cfg.seconds("numerics.step_us"))
    track = instantaneous_spectrum(schedule, traj.times)
    leak = ground_state_leakage(traj, track)
    estimate = adiabatic_leakage_estimate(schedule, track)
    at_i, ph_sf = state_atI(basis), state_phSF(basis)
    ops1 = number_operators(basis, 1)
    _, n_a2, _ = number_operators(basis, 2)
    scale = cfg["report.detection_scale"]

    cols = {"t_us": _t_us(traj.times), "pe_mean": []}
    report_cols = ("mean_a", "mean_p", "var_a", "var_p", "var_total", "cov_ap", "bound_lower",
                   "bound_upper")
    for name in report_cols:
        cols[name] = []
    cols.update({"fid_atI": [], "fid_phSF": [], "n_com": [], "n_rock": []})
    for psi in traj.states:
        cols["pe_mean"].append(scale * 0.5 * (expectation(psi, ops1[1]) + expectation(psi, n_a2)))
        rep = variance_report(psi, 1, ops1).as_dict()
        for name in report_cols:
            cols[name].append(rep[name])
        cols["fid_atI"].append(fidelity(at_i, psi))
        cols["fid_phSF"].append(fidelity(ph_sf, psi))
        n_com, n_rock = collective_occupations(psi)
        cols["n_com"].append(n_com)
        cols["n_rock"].append(n_rock)
    cols["leakage"] = leak.total
    cols["leakage_adiabatic"] = estimate.total
    writer.table("sweep", cols)


def cmd_eigen(cfg, writer):
    schedule = _sweep(cfg)
    track = instantaneous_spectrum(schedule)
    cols = {"t_us": _t_us(track.times)}
    for k in range(track.dim):
        cols[f"e{k + 1}_khz"] = units.to_khz(track.energies[:, k])
    writer.table("eigen", cols)

    refs = reference_tracks(track.basis)
    labels = {"level": [], "start_label": [], "start_fidelity": [], "end_label": [],
              "end_fidelity": []}
    for level, ((start, end), (start_name, end_name)) in enumerate(zip(refs, TRACK_NAMES)):
        labels["level"].append(level + 1)
        labels["start_label"].append(start_name)
        labels["start_fidelity"].append(fidelity(start, track.tracked_vector(0, level)))
        labels["end_label"].append(end_name)
        labels["end_fidelity"].append(fidelity(end, track.tracked_vector(-1, level)))
    writer.table("eigen_labels", labels)


def cmd_variances(cfg, writer):
    schedule = _sweep(cfg)
    track = instantaneous_spectrum(schedule)
    cols = {k: [] for k in ("t_us", "var_a", "var_p", "var_total", "bound_lower", "bound_upper",
                            "var_p_estimated", "n_com", "n_rock")}
    for i, t in enumerate(track.times):
        ground = track.ground(i)
        rep = variance_report(ground, 1)
        n_com, n_rock = collective_occupations(ground)
        cols["t_us"].append(units.to_us(t))
        cols["var_a"].append(rep.var_a)
        cols["var_p"].append(rep.var_p)
        cols["var_total"].append(rep.var_total_exact)
        cols["bound_lower"].append(rep.lower)
        cols["bound_upper"].append(rep.upper)
        cols["var_p_estimated"].append(estimated_phonon_variance(ground, 1))
        cols["n_com"].append(n_com)
        cols["n_rock"].append(n_rock)
    writer.table("variances", cols)


def _probe(cfg):
    return Probe(
        rabi=cfg.omega("spectrum.rabi_khz"),
        pulse=cfg.seconds("spectrum.pulse_us"),
        linewidth=cfg.omega("spectrum.linewidth_khz"),
    )


def cmd_spectrum(cfg, writer):
    modes = collective_mode_frequencies(_trap(cfg))
    probe = _probe(cfg)
    occupations = (cfg["spectrum.nbar_com"], cfg["spectrum.nbar_rock"])
    for side in ("red", "blue"):
        grid = default_detunings(modes, probe, side, n_points=cfg["spectrum.points"])
        data = sideband_spectrum(occupations, probe, side, modes, grid)
        writer.table(f"{cfg['spectrum.label']}_{side}", {
            "detuning_khz": units.to_khz(data.detunings),
            "population": data.population,
        })


def cmd_fit(cfg, writer):
    modes = collective_mode_frequencies(_trap(cfg))
    width = cfg.omega("fit.linewidth_khz")
    peaks_cols = {k: [] for k in ("stage", "side", "mode", "center_khz", "height", "width_khz",
                                  "rms", "converged")}
    nbar_cols = {"stage": [], "mode": [], "nbar": []}
    for stage in cfg.stages():
        heights = {}
        for side in ("red", "blue"):
            data = read_spectrum_csv(cfg.path(f"fit.{stage}.{side}_csv"), side)
            sign = -1.0 if side == "red" else 1.0
            centers = [sign * w for w in modes]
            guesses = []
            for c in centers:
                near = np.abs(data.detunings - c) <= 2.0 * width
                h0 = float(data.population[near].max()) if near.any() else 0.0
                guesses.append((c, h0, width))
            fit = fit_sideband_spectrum(data, len(centers), guesses,
                                        max_iterations=cfg["fit.max_iterations"])
            if not fit.converged:
                log.warning("fit of %s/%s did not converge: %s", stage, side, fit.message)
            for mode, pk in zip(("com", "rock"), match_peaks(fit.peaks, centers)):
                peaks_cols["stage"].append(stage)
                peaks_cols["side"].append(side)
                peaks_cols["mode"].append(mode)
                peaks_cols["center_khz"].append(units.to_khz(pk.center))
                peaks_cols["height"].append(pk.height)
                peaks_cols["width_khz"].append(units.to_khz(abs(pk.width)))
                peaks_cols["rms"].append(fit.rms)
                peaks_cols["converged"].append(fit.converged)
                heights[(side, mode)] = max(pk.height, 0.0)
        for mode in ("com", "rock"):
            red, blue = heights[("red", mode)], heights[("blue", mode)]
            try:
                nbar = nbar_from_ratio(red, blue)
            except ValueError:
                nbar = float("nan")
                log.warning("stage %s mode %s: red height %.3g >= blue %.3g", stage, mode, red,
                            blue)
            nbar_cols["stage"].append(stage)
            nbar_cols["mode"].append(mode)
            nbar_cols["nbar"].append(nbar)
    writer.table("fit_peaks", peaks_cols)
    writer.table("fit_nbar", nbar_cols)


COMMANDS = {
    "dynamics": cmd_dynamics,
    "sweep": cmd_sweep,
    "eigen": cmd_eigen,
    "variances": cmd_variances,
    "spectrum": cmd_spectrum,
    "fit": cmd_fit,
}
assert set(COMMANDS) == set(EXPERIMENTS)


def build_parser():
    parser = argparse.ArgumentParser(prog="jchsim", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="flat key = value config file")
    parser.add_argument("--out", help="output directory (overrides output.path)")
    parser.add_argument("--seed", type=int, help="noise seed (overrides noise.seed)")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=f"jchsim {__version__}")
    return parser


def run(command, config_path, out=None, seed=None):
    """Run one command; returns the list of files written. Raises on failure."""
    overrides = {} if seed is None else {"noise.seed": seed}
    cfg = load_config(config_path, command, overrides)
    out_dir = Path(out) if out is not None else cfg.path("output.path")
    writer = Writer(cfg, command, out_dir)
    COMMANDS[command](cfg, writer)
    return writer.written


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="jchsim: %(message)s")
    try:
        written = run(args.command, args.config, args.out, args.seed)
    except (ConfigError, SpectrumFileError, BasisError) as exc:
        print(f"jchsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"jchsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StepTooLargeError, NumericFailure, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"jchsim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"jchsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in written:
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
