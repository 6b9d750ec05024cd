"""Command-line surface for reproducible dataset generation.

    epsqueeze <command> [--config path] [--out dir] [--seed n] [--threads n]

Commands:
    squeeze      squeezing factor vs time and vs coupling (+ Re/Im A)
    sense-sweep  quadrature/susceptibility vs coupling, precision vs time,
                 amplitude sweep at the n=2 working point
    sense        single sensitivity report (JSON) + Monte-Carlo summary
    fock         truncated-Fock-space traces with and without Kerr term
    bec          ring-condensate trajectory and interaction-strength sweep
    platform     map four-wave-mixing inputs onto model parameters

The config file (TOML or JSON) holds one block per command; every value has
a default, so each command runs standalone.  Outputs are CSV files with a
'#'-metadata header or JSON reports; identical (config, seed) give
byte-identical files.  Exit codes: 0 success, 2 config error, 3 numerical
validity error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, bec, fock, platforms, sensing
from ._io import config_hash, write_csv, write_json
from .dynamics import CoherentPair, ModelParams, lambda0, quadrature_mean, squeeze_summary, transfer_coeffs
from .errors import ConfigError, NumericalValidityError


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    text = p.read_text()
    try:
        if p.suffix == ".json":
            return json.loads(text)
        try:
            import tomllib  # py311+
        except ModuleNotFoundError:
            import tomli as tomllib
        return tomllib.loads(text)
    except (json.JSONDecodeError, ValueError) as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from exc


def _merge(defaults: dict, override: dict) -> dict:
    out = dict(defaults)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _meta(command: str, cfg: dict, seed: int) -> dict:
    return {
        "command": command,
        "config_hash": config_hash(cfg),
        "seed": seed,
        "version": f"epsqueeze {__version__}",
    }


# --- squeeze ------------------------------------------------------------------

_SQUEEZE_DEFAULTS = {
    "delta": 1.0,
    "kappa_ratios": [0.95, 1.0, 1.05],
    "t_max": 30.0,
    "nt": 601,
    "sweep_times": [15.0, 30.0],
    "kappa_min": 0.8,
    "kappa_max": 1.2,
    "n_kappa": 801,
}


def cmd_squeeze(cfg: dict, out: Path, seed: int, threads: int) -> None:
    c = _merge(_SQUEEZE_DEFAULTS, cfg.get("squeeze", {}))
    delta = float(c["delta"])
    if c["nt"] < 2 or c["n_kappa"] < 2 or not c["kappa_ratios"]:
        raise ConfigError("squeeze grids must be non-empty")
    meta = _meta("squeeze", c, seed)

    ts = np.linspace(0.0, float(c["t_max"]), int(c["nt"]))
    rows = []
    for ratio in c["kappa_ratios"]:
        params = ModelParams(delta=delta, kappa=ratio * delta)
        for t in ts:
            rows.append((ratio, t, squeeze_summary(params, t).S))
    write_csv(out / "squeeze_time.csv", meta, ["kappa_ratio", "t", "S"], rows)

    kappas = np.linspace(float(c["kappa_min"]), float(c["kappa_max"]), int(c["n_kappa"]))
    rows = []
    for t in c["sweep_times"]:
        for kappa in kappas:
            params = ModelParams(delta=delta, kappa=float(kappa))
            coeffs = transfer_coeffs(params, float(t))
            rows.append(
                (t, kappa, squeeze_summary(params, float(t)).S, coeffs.A.real, coeffs.A.imag)
            )
    write_csv(out / "squeeze_kappa.csv", meta, ["t", "kappa", "S", "re_A", "im_A"], rows)


# --- sense-sweep --------------------------------------------------------------

_SENSE_SWEEP_DEFAULTS = {
    "delta": 1.0,
    "alpha": None,  # default 2*sign(delta)
    "sweep_times": [10.0, 15.0, 30.0],
    "kappa_min": 0.85,
    "kappa_max": 0.999,
    "n_kappa": 601,
    "precision_ratios": [0.94, 0.95],
    "t_max": 25.0,
    "nt": 2001,
    "alpha_min": 0.25,
    "alpha_max": 8.0,
    "n_alpha": 64,
    "working_index": 2,
}


def _sense_config(params, alpha, t=None, n=None):
    return sensing.SensorConfig(
        params=params,
        alphas=CoherentPair.quadrature_convention(alpha),
        t=t,
        working_index=n,
    )


def cmd_sense_sweep(cfg: dict, out: Path, seed: int, threads: int) -> None:
    c = _merge(_SENSE_SWEEP_DEFAULTS, cfg.get("sense_sweep", {}))
    delta = float(c["delta"])
    alpha = float(c["alpha"]) if c["alpha"] is not None else 2.0 * math.copysign(1.0, delta)
    meta = _meta("sense-sweep", c, seed)
    kappas = np.linspace(float(c["kappa_min"]), float(c["kappa_max"]), int(c["n_kappa"]))
    alphas = CoherentPair.quadrature_convention(alpha)

    rows = []
    for t in c["sweep_times"]:
        for kappa in kappas:
            params = ModelParams(delta=delta, kappa=float(kappa))
            chi = sensing.susceptibility(_sense_config(params, alpha, t=float(t)))
            x = quadrature_mean(params, float(t), alphas)
            rows.append((t, kappa, x, chi, abs(chi)))
    write_csv(out / "xmean_kappa.csv", meta, ["t", "kappa", "x_mean", "chi", "abs_chi"], rows)

    # coupling-dependent time pinned to the n-th working point
    n_work = int(c["working_index"])
    rows = []
    for kappa in kappas:
        params = ModelParams(delta=delta, kappa=float(kappa))
        if params.signed_gap <= 0.0:
            continue
        t = n_work * math.pi / lambda0(params)
        chi = sensing.susceptibility(_sense_config(params, alpha, t=t))
        rows.append((kappa, t, quadrature_mean(params, t, alphas), chi, abs(chi)))
    write_csv(
        out / "chi_working_time.csv", meta, ["kappa", "t", "x_mean", "chi", "abs_chi"], rows
    )

    ts = np.linspace(0.0, float(c["t_max"]), int(c["nt"]))
    rows = []
    for ratio in c["precision_ratios"]:
        params = ModelParams(delta=delta, kappa=ratio * delta)
        for t in ts:
            report = sensing.sensitivity_report(_sense_config(params, alpha, t=float(t)))
            rows.append((ratio, t, report.inv_var, report.qfi))
    write_csv(out / "precision_time.csv", meta, ["kappa_ratio", "t", "inv_var", "qfi"], rows)

    params = ModelParams(delta=delta, kappa=0.95 * delta)
    rows = []
    for a in np.linspace(float(c["alpha_min"]), float(c["alpha_max"]), int(c["n_alpha"])):
        report = sensing.sensitivity_report(_sense_config(params, float(a), n=n_work))
        rows.append((a, report.inv_var, report.qfi, report.ratio))
    write_csv(out / "alpha_sweep.csv", meta, ["alpha", "inv_var", "qfi", "ratio"], rows)


# --- sense --------------------------------------------------------------------

_SENSE_DEFAULTS = {
    "delta": 1.0,
    "kappa": 0.95,
    "alpha": 2.0,
    "working_index": 2,
    "t": None,
    "wrt": "kappa",
    "shots": 10000,
}


def cmd_sense(cfg: dict, out: Path, seed: int, threads: int) -> None:
    c = _merge(_SENSE_DEFAULTS, cfg.get("sense", {}))
    params = ModelParams(delta=float(c["delta"]), kappa=float(c["kappa"]))
    meta = _meta("sense", c, seed)
    config = sensing.SensorConfig(
        params=params,
        alphas=CoherentPair.quadrature_convention(float(c["alpha"])),
        t=float(c["t"]) if c["t"] is not None else None,
        working_index=int(c["working_index"]) if c["t"] is None else None,
        wrt=str(c["wrt"]),
    )
    report = sensing.sensitivity_report(config)
    write_json(out / "report.json", meta, report.to_dict())
    mc = sensing.monte_carlo_estimate(config, params, shots=int(c["shots"]), seed=seed)
    write_json(out / "monte_carlo.json", meta, mc.to_dict())


# --- fock ---------------------------------------------------------------------

_FOCK_DEFAULTS = {
    "delta": 1.0,
    "kerr_over_delta": [0.0, 1e-6],
    "traces": [
        {"ratio": 0.95, "cutoff": 500, "t_max": 30.0, "nt": 121},
        {"ratio": 0.99, "cutoff": 1200, "t_max": 30.0, "nt": 121},
        {"ratio": 1.0, "cutoff": 1200, "t_max": 7.5, "nt": 31},
        {"ratio": 1.05, "cutoff": 1200, "t_max": 4.8, "nt": 25},
    ],
}


def cmd_fock(cfg: dict, out: Path, seed: int, threads: int) -> None:
    c = _merge(_FOCK_DEFAULTS, cfg.get("fock", {}))
    delta = float(c["delta"])
    meta = _meta("fock", c, seed)
    columns = ["t", "S_num", "n_mean_1", "n_mean_2", "norm_drift", "top_population"]
    for spec in c["traces"]:
        ratio = float(spec["ratio"])
        params = ModelParams(delta=delta, kappa=ratio * delta)
        basis = fock.FockBasis(int(spec["cutoff"]), int(spec["cutoff"]), sector=0)
        times = np.linspace(0.0, float(spec["t_max"]), int(spec["nt"]))
        for u_rel in c["kerr_over_delta"]:
            h = fock.build_hamiltonian(params, fock.KerrParams(u=float(u_rel) * delta), basis)
            snaps = fock.evolve_trace(
                fock.prepare_vacuum(basis), h, times, on_truncation="warn"
            )
            rows = []
            for snap in snaps:
                table = fock.moments(snap)
                s_num, _ = fock.squeeze_factor_from_moments(table.centered())
                rows.append(
                    (
                        snap.time,
                        s_num,
                        table.n1,
                        table.n2,
                        fock.norm_drift(snap),
                        fock.top_population(snap),
                    )
                )
            name = f"fock_trace_r{ratio:g}_u{float(u_rel):g}.csv"
            write_csv(out / name, meta, columns, rows)


# --- bec ----------------------------------------------------------------------

_BEC_DEFAULTS = {
    "e1": 1.0,
    "phi0_sq": 1e5,
    "n_max": 10,
    "dt": 1e-3,
    "trace": {"g_phi2": 0.48, "alpha": 2.0, "t_final": 30.0, "sample_every": 25},
    "sweep": {"g_phi2": [0.46, 0.462, 0.465, 0.468], "alpha": 20.0, "t_final": 30.0},
}


def cmd_bec(cfg: dict, out: Path, seed: int, threads: int) -> None:
    c = _merge(_BEC_DEFAULTS, cfg.get("bec", {}))
    meta = _meta("bec", c, seed)
    common = dict(
        e1=float(c["e1"]), phi0_sq=float(c["phi0_sq"]), n_max=int(c["n_max"]), dt=float(c["dt"])
    )

    tr = c["trace"]
    params = bec.ring_params(float(tr["g_phi2"]), float(tr["alpha"]), **common)
    traj = bec.trajectory(params, float(tr["t_final"]), int(tr["sample_every"]))
    s_n = traj.squeeze_factors()
    columns = (
        ["t", "re_phi", "im_phi"]
        + [f"S_{n}" for n in range(1, params.n_max + 1)]
        + ["X_p1", "P_p1", "depletion_fraction"]
    )
    rows = [
        (traj.t[i], traj.phi[i].real, traj.phi[i].imag)
        + tuple(s_n[i])
        + (traj.x_p1[i], traj.p_p1[i], traj.depletion[i])
        for i in range(len(traj.t))
    ]
    write_csv(out / "bec_trajectory.csv", meta, columns, rows)

    sw = c["sweep"]
    result = bec.sensing_sweep(
        [float(g) for g in sw["g_phi2"]],
        float(sw["alpha"]),
        float(sw["t_final"]),
        threads=threads,
        **common,
    )
    rows = [
        (
            result["g"][i],
            result["x"][i],
            result["chi_g"][i],
            result["visibility"][i],
            result["ep_flag"][i],
        )
        for i in range(len(result["g"]))
    ]
    write_csv(
        out / "bec_sweep.csv", meta, ["g", "X", "chi_g", "visibility", "ep_flag"], rows
    )


# --- platform -----------------------------------------------------------------


def cmd_platform(cfg: dict, out: Path, seed: int, threads: int) -> None:
    if "fwm" not in cfg:
        raise ConfigError("platform command needs an 'fwm' config block")
    try:
        params = platforms.FwmParams(**cfg["fwm"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad fwm block: {exc}") from exc
    meta = _meta("platform", cfg["fwm"], seed)
    dk, model = platforms.phase_mismatch(params)
    write_json(
        out / "platform.json",
        meta,
        {
            "dk": dk,
            "kappa_tilde": platforms.fwm_coupling(params),
            "model": {"delta": model.delta, "kappa": model.kappa.real},
        },
    )


_COMMANDS = {
    "squeeze": cmd_squeeze,
    "sense-sweep": cmd_sense_sweep,
    "sense": cmd_sense,
    "fock": cmd_fock,
    "bec": cmd_bec,
    "platform": cmd_platform,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="epsqueeze", description=__doc__.split("\n")[0])
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", default=None, help="TOML or JSON config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="random seed (u64)")
    parser.add_argument("--threads", type=int, default=1, help="parallel sweep workers")
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](cfg, out, args.seed, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalValidityError as exc:
        print(f"numerical validity error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
