"""Flat ``key = value`` run configuration.

Lines look like ``pulse.two_g_khz = 12.0``; ``#`` starts a comment. Every
frequency is an ordinary frequency in the unit named by the key suffix
(``_hz``, ``_khz``, ``_mhz``) and every time is in microseconds
(``_us``). :meth:`RunConfig.omega` and :meth:`RunConfig.seconds` are the
only places those values become rad/s and seconds.
"""

import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import units

EXPERIMENTS = ("dynamics", "sweep", "eigen", "variances", "spectrum", "fit")


class ConfigError(ValueError):
    pass


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _kappa(text):
    return text.strip() if text.strip() == "trap" else float(text)


# key -> (parser, default). A dict default is keyed by experiment.
SCHEMA = {
    "experiment": (str, None),
    "trap.omega_x_mhz": (float, 2.1),
    "trap.omega_z_mhz": (float, 0.17),
    "pulse.kappa_khz": (_kappa, {"dynamics": 5.4, None: 6.0}),
    "pulse.two_g_khz": (float, 12.0),
    "pulse.detuning_khz": (float, 0.0),
    "pulse.duration_us": (float, {"dynamics": 1000.0, None: 960.0}),
    "pulse.delta_start_khz": (float, -41.0),
    "pulse.delta_end_khz": (float, 59.0),
    "pulse.two_g_peak_khz": (float, 14.0),
    "pulse.edge_factor": (float, 0.29),
    "pulse.samples": (int, {"dynamics": 501, None: 241}),
    "noise.sigma_hz": (float, {"dynamics": 200.0, None: 0.0}),
    "noise.trajectories": (int, 200),
    "noise.seed": (int, 0),
    "numerics.n_max": (int, 5),
    "numerics.step_us": (float, 0.25),
    "numerics.sector": (_bool, True),
    "output.format": (str, "csv"),
    "output.path": (str, "."),
    "report.detection_scale": (float, 1.0),
    "spectrum.label": (str, "spectrum"),
    "spectrum.nbar_com": (float, 0.15),
    "spectrum.nbar_rock": (float, 1.58),
    "spectrum.rabi_khz": (float, 2.0),
    "spectrum.pulse_us": (float, 30.0),
    "spectrum.linewidth_khz": (float, 1.0),
    "spectrum.points": (int, 401),
    "fit.stages": (str, "data"),
    "fit.linewidth_khz": (float, 1.0),
    "fit.max_iterations": (int, 2000),
}

STAGE_KEY = re.compile(r"^fit\.([A-Za-z0-9_-]+)\.(red_csv|blue_csv)$")


@dataclass
class RunConfig:
    experiment: str
    values: dict
    explicit: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    def omega(self, key):
        """Value of a frequency key in rad/s."""
        value = self.values[key]
        for suffix, conv in (("_mhz", units.mhz), ("_khz", units.khz), ("_hz", units.hz)):
            if key.endswith(suffix):
                return conv(value)
        raise KeyError(f"{key} is not a frequency key")

    def seconds(self, key):
        if not key.endswith("_us"):
            raise KeyError(f"{key} is not a time key")
        return units.us(self.values[key])

    def path(self, key):
        p = Path(self.values[key])
        return p if p.is_absolute() else self.base_dir / p

    def stages(self):
        return [s.strip() for s in self.values["fit.stages"].split(",") if s.strip()]

    def canonical_text(self):
        """Sorted ``key = value`` listing of every resolved value."""
        return "".join(f"{k} = {self.values[k]}\n" for k in sorted(self.values))

    def digest(self):
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


def parse_text(text):
    """Raw ``{key: string}`` pairs from config text."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key}")
        pairs[key] = value
    return pairs


def build_config(pairs, experiment=None, base_dir=Path("."), overrides=None):
    pairs = dict(pairs)
    pairs.update(overrides or {})
    declared = pairs.get("experiment")
    if experiment is None:
        experiment = declared
    elif declared is not None and declared != experiment:
        raise ConfigError(f"experiment: config says {declared!r} but command is {experiment!r}")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment: unknown experiment {experiment!r}")

    values, explicit = {}, {}
    for key, text in pairs.items():
        if key in SCHEMA:
            parser = SCHEMA[key][0]
        elif STAGE_KEY.match(key):
            parser = str
        else:
            raise ConfigError(f"{key}: unknown configuration key")
        try:
            values[key] = parser(text) if isinstance(text, str) else text
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
        explicit[key] = values[key]
    values["experiment"] = experiment
    for key, (_, default) in SCHEMA.items():
        if key not in values:
            if isinstance(default, dict):
                default = default.get(experiment, default[None])
            if default is not None:
                values[key] = default
    _validate(values, experiment)
    return RunConfig(experiment, values, explicit, Path(base_dir))


def _validate(values, experiment):
    if values["output.format"] not in ("csv", "json"):
        raise ConfigError(f"output.format: expected csv or json, got {values['output.format']!r}")
    for key in ("noise.trajectories", "pulse.samples", "spectrum.points", "fit.max_iterations"):
        if values[key] < 1:
            raise ConfigError(f"{key}: must be >= 1")
    for key in ("numerics.step_us", "pulse.duration_us", "spectrum.linewidth_khz",
                "fit.linewidth_khz"):
        if not values[key] > 0:
            raise ConfigError(f"{key}: must be > 0")
    if values["noise.sigma_hz"] < 0:
        raise ConfigError("noise.sigma_hz: must be >= 0")
    if values["noise.seed"] < 0:
        raise ConfigError("noise.seed: must be >= 0")
    if not 0.0 < values["pulse.edge_factor"] < 1.0:
        raise ConfigError("pulse.edge_factor: must lie in (0, 1)")
    if values["numerics.n_max"] < 2:
        raise ConfigError("numerics.n_max: must be >= 2 for two-excitation runs")
    if experiment == "fit":
        stages = [s.strip() for s in values["fit.stages"].split(",") if s.strip()]
        if not stages:
            raise ConfigError("fit.stages: no stages listed")
        for stage in stages:
            for side in ("red", "blue"):
                key = f"fit.{stage}.{side}_csv"
                if key not in values:
                    raise ConfigError(f"{key}: required for fit stage {stage!r}")


def load_config(path, experiment=None, overrides=None):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return build_config(parse_text(text), experiment, path.parent, overrides)
