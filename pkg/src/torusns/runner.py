"""Pipeline orchestration: config -> simulation -> recorded norms ->
verifier reports -> files on disk.

Every emitted artifact except the manifest timestamp is a deterministic
function of the parsed config, so rerunning a config reproduces the same
bytes.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, decay, io, wellposed
from .config import RunConfig
from .norms import l2_norm, x_norm
from .solver import FluidParams, StepScheme, Trajectory, simulate
from .spectral import (
    SpectralVectorField,
    SpectrumProfile,
    leray_project,
    make_grid,
    random_divfree_field,
    scale_field,
    taylor_green,
    zero_field,
)


@dataclass
class RunManifest:
    config_hash: str
    tool_version: str
    timestamp: str
    grid: dict
    run: dict
    u0_norms: dict
    files: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)


def build_initial_data(cfg: RunConfig) -> SpectralVectorField:
    grid = make_grid(cfg.n, cfg.box_length)
    ini = cfg.initial_data
    if ini.kind == "taylor_green":
        u0 = taylor_green(grid, ini.amplitude)
    elif ini.kind == "random":
        profile = SpectrumProfile(
            shape=ini.profile_shape,
            amplitude=ini.amplitude,
            m_lo=ini.profile_m_lo,
            m_hi=ini.profile_m_hi,
            exponent=ini.profile_exponent,
            seed=cfg.seed,
        )
        u0 = random_divfree_field(grid, profile)
    else:
        u0 = io.read_field(ini.path)
        if u0.grid.n != cfg.n or u0.grid.box_length != cfg.box_length:
            raise ValueError(
                f"snapshot grid ({u0.grid.n}, {u0.grid.box_length}) does not match "
                f"config grid ({cfg.n}, {cfg.box_length})"
            )
        u0 = leray_project(u0)
    if ini.scale_to_xm1 is not None:
        cur = x_norm(u0, -1.0)
        if cur == 0.0:
            raise ValueError("cannot normalize a zero field")
        u0 = scale_field(u0, ini.scale_to_xm1 / cur)
    if ini.scale_to_l2 is not None:
        cur = l2_norm(u0)
        if cur == 0.0:
            raise ValueError("cannot normalize a zero field")
        u0 = scale_field(u0, ini.scale_to_l2 / cur)
    return u0


def _timestamp() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _verdict(report) -> bool:
    return report.all_hold is True


def run(cfg: RunConfig) -> RunManifest:
    """Full pipeline: simulate, record norms, run requested verifiers, emit files."""
    out_dir = cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    reports_dir = os.path.join(out_dir, "reports")
    snap_dir = os.path.join(out_dir, "snapshots")
    os.makedirs(reports_dir, exist_ok=True)
    os.makedirs(snap_dir, exist_ok=True)

    u0 = build_initial_data(cfg)
    grid = u0.grid
    scheme = StepScheme(cfg.scheme_kind, cfg.dt)
    traj = simulate(u0, cfg.nu, scheme, cfg.t_end, cfg.sample_every)
    series = decay.record(traj, cfg.sigmas)
    u0_l2 = series[0].l2
    u0_xm1 = series[0].x[-1.0]
    eps0 = cfg.gevrey_eps0 if cfg.gevrey_eps0 is not None else cfg.nu / 4.0

    files = []

    def emit_text(name, text):
        path = os.path.join(out_dir, name)
        with open(path, "w") as fh:
            fh.write(text)
        files.append(name)

    def emit_json(relname, obj):
        path = os.path.join(out_dir, relname)
        io.dump_json(path, obj)
        files.append(relname)

    emit_text("norms.csv", io.norms_csv_text(series, cfg.sigmas))
    emit_text("extras.csv", io.extras_csv_text(series))

    band_cache = {}
    for delta in cfg.deltas:
        w_l2, w_x1, v_l2, u_l2, u_x1 = decay._band_series(traj, delta)
        band_cache[delta] = (w_l2, w_x1, v_l2, u_l2, u_x1)
        emit_text(f"bands_{delta:g}.csv", io.bands_csv_text(traj.times, w_l2, w_x1, v_l2))

    verdicts = {}

    def record_report(name, report):
        emit_json(os.path.join("reports", f"{name}.json"), report)
        verdicts[name] = _verdict(report)

    for check in cfg.checks:
        if check == "gronwall":
            record_report("gronwall", decay.verify_gronwall(series, u0_l2))
        elif check == "eq2":
            record_report("eq2", decay.verify_eQ2(series, u0_xm1, cfg.nu))
        elif check == "gevrey":
            record_report("gevrey", decay.verify_gevrey(series, u0_xm1, cfg.nu, eps0))
        elif check == "split":
            record_report(
                "split", decay.verify_split_inequality(series, grid, cfg.nu, u0_l2)
            )
        elif check == "lowpass":
            for delta in cfg.deltas:
                w_l2, w_x1, _, u_l2, _ = band_cache[delta]
                rep = decay.lowpass_bound_core(
                    traj.times, w_l2, w_x1, float(np.max(u_l2)), delta
                )
                record_report(f"lowpass_{delta:g}", rep)
        elif check == "highpass":
            for delta in cfg.deltas:
                _, _, v_l2, u_l2, u_x1 = band_cache[delta]
                rep = decay.highpass_bound_core(
                    traj.times, v_l2, u_x1, float(u_l2[0]), cfg.nu, delta, float(np.max(u_l2))
                )
                record_report(f"highpass_{delta:g}", rep)
        elif check == "sigma_case1":
            for sigma in cfg.sigmas:
                if -1.5 < sigma < -1.0:
                    rep = decay.verify_sigma_decay_case1(series, sigma, grid)
                    record_report(f"sigma_case1_{sigma:g}", rep)
        elif check == "sigma_case2":
            for sigma in sorted(set(cfg.sigmas) | {0.0, 1.0}):
                if sigma > -1.0:
                    rep = decay.verify_sigma_decay_case2(series, sigma, cfg.nu)
                    record_report(f"sigma_case2_{sigma:g}", rep)

    if cfg.fit_window:
        fits = {
            f"{sigma:g}": decay.fit_decay_slope(series, sigma, tuple(cfg.fit_window))
            for sigma in sorted(set(cfg.sigmas) | {-1.0, 0.0, 1.0})
        }
        emit_json("fits.json", fits)

    stride = cfg.snapshot_stride
    indices = (
        range(0, len(traj.times), stride) if stride > 0 else [0, len(traj.times) - 1]
    )
    snap_files = []
    for i in sorted(set(indices) | {len(traj.times) - 1}):
        name = os.path.join("snapshots", f"state_{i:06d}.svf")
        io.write_field(os.path.join(out_dir, name), traj.states[i])
        snap_files.append(name)
    files.extend(snap_files)

    manifest = RunManifest(
        config_hash=cfg.config_hash(),
        tool_version=__version__,
        timestamp=_timestamp(),
        grid={"n": cfg.n, "box_length": cfg.box_length},
        run={
            "nu": cfg.nu,
            "scheme": cfg.scheme_kind,
            "dt": cfg.dt,
            "t_end": cfg.t_end,
            "sample_every": cfg.sample_every,
            "seed": cfg.seed,
            "sigmas": list(cfg.sigmas),
            "deltas": list(cfg.deltas),
            "gevrey_eps0": eps0,
        },
        u0_norms={"l2": u0_l2, "xm1": u0_xm1},
        files=sorted(files),
        verdicts=verdicts,
    )
    io.dump_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest


def _series_from_run_dir(run_dir):
    import json

    with open(os.path.join(run_dir, "manifest.json")) as fh:
        manifest = json.load(fh)
    norms = io.read_csv_columns(os.path.join(run_dir, "norms.csv"))
    extras = io.read_csv_columns(os.path.join(run_dir, "extras.csv"))
    sigma_cols = {}
    for name in norms:
        if name == "x_m1":
            sigma_cols[-1.0] = norms[name]
        elif name.startswith("x_"):
            sigma_cols[float(name[2:])] = norms[name]
    series = []
    for i in range(len(norms["t"])):
        series.append(
            decay.NormSample(
                t=float(norms["t"][i]),
                l2=float(norms["l2"][i]),
                x={s: float(col[i]) for s, col in sigma_cols.items()},
                gevrey_xm1=float(norms["gevrey"][i]),
                gevrey_xm1_analytic=float(extras["gevrey_analytic"][i]),
                gevrey_x1_analytic=float(extras["gevrey_x1_analytic"][i]),
                hdot1=float(norms["hdot1"][i]),
                i_lam=float(extras["i_lam"][i]),
                j_lam=float(extras["j_lam"][i]),
            )
        )
    return manifest, series


def decay_checks_from_dir(run_dir, checks, fit_window=None, sigmas=None):
    """Re-run the requested verifiers against a stored run directory."""
    manifest, series = _series_from_run_dir(run_dir)
    nu = manifest["run"]["nu"]
    grid = make_grid(manifest["grid"]["n"], manifest["grid"]["box_length"])
    u0_l2 = manifest["u0_norms"]["l2"]
    u0_xm1 = manifest["u0_norms"]["xm1"]
    eps0 = manifest["run"]["gevrey_eps0"]
    deltas = manifest["run"]["deltas"]
    all_sigmas = sigmas if sigmas is not None else manifest["run"]["sigmas"]
    times = np.array([s.t for s in series])
    u_l2 = np.array([s.l2 for s in series])
    x1 = np.array([s.x[1.0] for s in series])

    reports = {}
    if "gronwall" in checks:
        reports["gronwall"] = decay.verify_gronwall(series, u0_l2)
    if "eq2" in checks:
        reports["eq2"] = decay.verify_eQ2(series, u0_xm1, nu)
    if "gevrey" in checks:
        reports["gevrey"] = decay.verify_gevrey(series, u0_xm1, nu, eps0)
    if "split" in checks:
        reports["split"] = decay.verify_split_inequality(series, grid, nu, u0_l2)
    if "lowpass" in checks or "highpass" in checks:
        for delta in deltas:
            bands = io.read_csv_columns(os.path.join(run_dir, f"bands_{delta:g}.csv"))
            if "lowpass" in checks:
                reports[f"lowpass_{delta:g}"] = decay.lowpass_bound_core(
                    times, bands["w_l2"], bands["w_x1"], float(np.max(u_l2)), delta
                )
            if "highpass" in checks:
                reports[f"highpass_{delta:g}"] = decay.highpass_bound_core(
                    times, bands["v_l2"], x1, float(u_l2[0]), nu, delta, float(np.max(u_l2))
                )
    if "sigma_case1" in checks:
        for sigma in all_sigmas:
            if -1.5 < sigma < -1.0:
                reports[f"sigma_case1_{sigma:g}"] = decay.verify_sigma_decay_case1(
                    series, sigma, grid
                )
    if "sigma_case2" in checks:
        for sigma in sorted(set(all_sigmas) | {0.0, 1.0}):
            if sigma > -1.0:
                reports[f"sigma_case2_{sigma:g}"] = decay.verify_sigma_decay_case2(
                    series, sigma, nu
                )
    fits = None
    if fit_window:
        fits = {
            f"{sigma:g}": decay.fit_decay_slope(series, sigma, tuple(fit_window))
            for sigma in sorted(set(all_sigmas) | {-1.0, 0.0, 1.0})
        }
    return reports, fits


def wellposed_run(cfg: RunConfig) -> dict:
    """Rescale -> split -> low-part solve -> conditions -> contraction -> crosscheck."""
    u0 = build_initial_data(cfg)
    nu = cfg.nu
    smallness = wellposed.global_smallness_check(u0, nu)
    split = wellposed.split_initial_data(u0, nu)
    scl = split.lam**2
    dt = cfg.dt / scl
    t_end = cfg.wellposed_t_end / scl
    sample_every = cfg.sample_every / scl
    scheme = StepScheme(cfg.scheme_kind, dt)
    grid = split.a0.grid
    if np.any(split.a0.coeffs):
        a_traj = simulate(split.a0, nu, scheme, t_end, sample_every)
    else:
        times = np.round(np.arange(0, round(t_end / sample_every) + 1) * sample_every, 15)
        zero = zero_field(grid)
        a_traj = Trajectory(times, [zero] * len(times), FluidParams(nu), scheme)

    u0_l2 = l2_norm(u0)
    cond = wellposed.find_epsilon_T(a_traj, split.b0, nu, u0_l2)
    result = {
        "smallness": smallness,
        "lambda": split.lam,
        "k0": split.k0,
        "tail": split.tail,
        "rescaled_horizon": t_end,
        "conditions": cond,
        "contraction": None,
        "crosscheck_x0_error": None,
        "succeeded": False,
    }
    if not cond.all_hold:
        return result
    contraction, mesh, b_states = wellposed.picard_fixed_point(
        split.b0, a_traj, cond.epsilon, cond.T, nu
    )
    result["contraction"] = contraction
    u0r = SpectralVectorField(grid, split.a0.coeffs + split.b0.coeffs)
    utraj = simulate(u0r, nu, scheme, cond.T, sample_every)
    combo = SpectralVectorField(
        grid, a_traj.state_at(cond.T).coeffs + b_states[-1].coeffs
    )
    err = x_norm(
        SpectralVectorField(grid, utraj.state_at(cond.T).coeffs - combo.coeffs), 0.0
    )
    result["crosscheck_x0_error"] = float(err)
    result["succeeded"] = bool(contraction.converged)
    return result
