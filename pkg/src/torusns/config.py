"""Run configuration: a strict TOML schema with defaults.

Unknown keys anywhere in the file are errors.  The same parsed config
plus seed reproduces byte-identical outputs, so configs are the unit of
reproducibility; numeric defaults are nu = 1, n = 32, L = 2 pi,
etdrk2 with dt = 1e-3.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import tomli

KNOWN_CHECKS = (
    "gronwall",
    "eq2",
    "gevrey",
    "lowpass",
    "highpass",
    "split",
    "sigma_case1",
    "sigma_case2",
)


class ConfigError(ValueError):
    pass


@dataclass
class InitialDataConfig:
    kind: str = "taylor_green"
    amplitude: float = 1.0
    profile_shape: str = "plateau"
    profile_exponent: float = 0.0
    profile_m_lo: float = 1.0
    profile_m_hi: float = 2.0
    path: str = ""
    scale_to_xm1: float | None = None
    scale_to_l2: float | None = None


@dataclass
class RunConfig:
    format_version: int = 1
    output_dir: str = "out"
    seed: int = 0
    n: int = 32
    box_length: float = 2.0 * math.pi
    nu: float = 1.0
    scheme_kind: str = "etdrk2"
    dt: float = 1e-3
    t_end: float = 1.0
    sample_every: float = 1e-2
    initial_data: InitialDataConfig = field(default_factory=InitialDataConfig)
    sigmas: list = field(default_factory=list)
    deltas: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    gevrey_eps0: float | None = None  # defaults to nu/4 downstream
    snapshot_stride: int = 0  # 0: first and last sample only
    wellposed_t_end: float = 0.5
    fit_window: list = field(default_factory=list)

    def config_hash(self) -> str:
        canon = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()


def _take(section: dict, known: dict, where: str):
    for key in section:
        if key not in known:
            raise ConfigError(f"unknown key {where}.{key}" if where else f"unknown key {key}")
    for key, (typ, setter) in known.items():
        if key in section:
            value = section[key]
            if typ is float and isinstance(value, int):
                value = float(value)
            if not isinstance(value, typ):
                raise ConfigError(
                    f"{where + '.' if where else ''}{key}: expected {typ}, got {type(value).__name__}"
                )
            setter(value)


def parse_config(text: str) -> RunConfig:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as err:
        raise ConfigError(f"malformed config: {err}") from err
    cfg = RunConfig()

    top_known = {
        "format_version": (int, lambda v: setattr(cfg, "format_version", v)),
        "output_dir": (str, lambda v: setattr(cfg, "output_dir", v)),
        "seed": (int, lambda v: setattr(cfg, "seed", v)),
        "grid": (dict, lambda v: None),
        "fluid": (dict, lambda v: None),
        "scheme": (dict, lambda v: None),
        "run": (dict, lambda v: None),
        "initial_data": (dict, lambda v: None),
        "decay": (dict, lambda v: None),
        "wellposed": (dict, lambda v: None),
    }
    _take(raw, top_known, "")

    _take(raw.get("grid", {}), {
        "n": (int, lambda v: setattr(cfg, "n", v)),
        "box_length": (float, lambda v: setattr(cfg, "box_length", v)),
    }, "grid")
    _take(raw.get("fluid", {}), {
        "nu": (float, lambda v: setattr(cfg, "nu", v)),
    }, "fluid")
    _take(raw.get("scheme", {}), {
        "kind": (str, lambda v: setattr(cfg, "scheme_kind", v)),
        "dt": (float, lambda v: setattr(cfg, "dt", v)),
    }, "scheme")
    _take(raw.get("run", {}), {
        "t_end": (float, lambda v: setattr(cfg, "t_end", v)),
        "sample_every": (float, lambda v: setattr(cfg, "sample_every", v)),
        "snapshot_stride": (int, lambda v: setattr(cfg, "snapshot_stride", v)),
    }, "run")
    ini = cfg.initial_data
    _take(raw.get("initial_data", {}), {
        "kind": (str, lambda v: setattr(ini, "kind", v)),
        "amplitude": (float, lambda v: setattr(ini, "amplitude", v)),
        "profile_shape": (str, lambda v: setattr(ini, "profile_shape", v)),
        "profile_exponent": (float, lambda v: setattr(ini, "profile_exponent", v)),
        "profile_m_lo": (float, lambda v: setattr(ini, "profile_m_lo", v)),
        "profile_m_hi": (float, lambda v: setattr(ini, "profile_m_hi", v)),
        "path": (str, lambda v: setattr(ini, "path", v)),
        "scale_to_xm1": (float, lambda v: setattr(ini, "scale_to_xm1", v)),
        "scale_to_l2": (float, lambda v: setattr(ini, "scale_to_l2", v)),
    }, "initial_data")
    _take(raw.get("decay", {}), {
        "sigmas": (list, lambda v: setattr(cfg, "sigmas", [float(x) for x in v])),
        "deltas": (list, lambda v: setattr(cfg, "deltas", [float(x) for x in v])),
        "checks": (list, lambda v: setattr(cfg, "checks", list(v))),
        "gevrey_eps0": (float, lambda v: setattr(cfg, "gevrey_eps0", v)),
        "fit_window": (list, lambda v: setattr(cfg, "fit_window", [float(x) for x in v])),
    }, "decay")
    _take(raw.get("wellposed", {}), {
        "t_end": (float, lambda v: setattr(cfg, "wellposed_t_end", v)),
    }, "wellposed")

    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.format_version != 1:
        raise ConfigError(f"unsupported format_version {cfg.format_version}")
    if cfg.n < 4 or cfg.n % 2 != 0:
        raise ConfigError(f"grid.n must be an even integer >= 4, got {cfg.n}")
    if cfg.box_length <= 0:
        raise ConfigError("grid.box_length must be positive")
    if cfg.nu <= 0:
        raise ConfigError("fluid.nu must be positive")
    if cfg.scheme_kind not in ("exponential_euler", "etdrk2"):
        raise ConfigError(f"scheme.kind must be exponential_euler or etdrk2, got {cfg.scheme_kind!r}")
    if cfg.dt <= 0:
        raise ConfigError("scheme.dt must be positive")
    if cfg.t_end <= 0:
        raise ConfigError("run.t_end must be positive")
    if cfg.sample_every <= 0:
        raise ConfigError("run.sample_every must be positive")
    if cfg.initial_data.kind not in ("taylor_green", "random", "file"):
        raise ConfigError(f"initial_data.kind must be taylor_green, random or file, got {cfg.initial_data.kind!r}")
    if cfg.initial_data.kind == "file" and not cfg.initial_data.path:
        raise ConfigError("initial_data.path required for kind = file")
    if cfg.initial_data.scale_to_xm1 is not None and cfg.initial_data.scale_to_l2 is not None:
        raise ConfigError("initial_data: scale_to_xm1 and scale_to_l2 are mutually exclusive")
    for s in cfg.sigmas:
        if s <= -3:
            raise ConfigError(f"decay.sigmas: sigma {s} violates the lattice bound sigma > -3")
    for d in cfg.deltas:
        if d <= 0:
            raise ConfigError("decay.deltas must be positive")
    for c in cfg.checks:
        if c not in KNOWN_CHECKS:
            raise ConfigError(f"decay.checks: unknown verifier {c!r} (known: {', '.join(KNOWN_CHECKS)})")
    if cfg.gevrey_eps0 is not None and cfg.gevrey_eps0 <= 0:
        raise ConfigError("decay.gevrey_eps0 must be positive")
    if cfg.fit_window and (len(cfg.fit_window) != 2 or cfg.fit_window[0] >= cfg.fit_window[1]):
        raise ConfigError("decay.fit_window must be [t_lo, t_hi] with t_lo < t_hi")
    if cfg.snapshot_stride < 0:
        raise ConfigError("run.snapshot_stride must be nonnegative")


def load_config(path) -> RunConfig:
    with open(path, "r") as fh:
        return parse_config(fh.read())
