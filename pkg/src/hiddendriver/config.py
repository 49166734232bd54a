"""Experiment configuration and its flat ``key = value`` file format.

One setting per line, ``#`` starts a comment, blank lines are ignored.
Lists are comma separated, booleans are ``true``/``false``, and ``none``
clears an optional value. Unknown keys are rejected. Example::

    family = logistic
    seed = 7
    methods = asom, pca
    n_train = 10000
"""

from dataclasses import dataclass, field, fields, replace
import typing

from .asom import TrainingSchedule
from .dynamics import LogisticTriadParams, TentTriadParams
from .errors import ConfigError

FAMILIES = ("logistic", "tent")
METHODS = ("asom", "random", "pca", "cca")

# Train/test lengths per family when not given explicitly.
_SPLITS = {"logistic": (10000, 10000), "tent": (16000, 2000)}


@dataclass
class ExperimentConfig:
    family: str = "logistic"
    seed: int = 0
    out_dir: str = "out"

    # system: explicit parameters unless sample_params is set
    sample_params: bool = False
    r_z: float = 3.8
    r_x: float = 3.8
    r_y: float = 3.8
    alpha_z: float = 0.3
    alpha_x: float = 0.3
    alpha_y: float = 0.3
    beta_x: float = 0.4
    beta_y: float = 0.3
    noise_sd: float = 0.001
    init: typing.Optional[list] = None
    coupling: str = "sugihara"
    tent_argument: str = "clip"
    burn_in: int = 1000
    max_restarts: int = 100
    n_train: typing.Optional[int] = None
    n_test: typing.Optional[int] = None

    # dimension analysis
    dim_chunk: int = 5000
    dim_m: int = 4
    dim_tau: int = 1
    k_min: int = 10
    k_max: int = 20
    relation_tol: float = 0.15
    check_relation: bool = False

    # SOM
    som_m: int = 3
    som_tau: int = 1
    som_shape: str = "auto"
    n1: int = 40
    n2: int = 20
    N: int = 10000
    K: int = 20
    sigma1_0: float = 10.0
    sigma2_0: float = 20.0
    sigma2_base: float = 5.0
    epsilon_0: float = 0.2
    epsilon_base: float = 20.0
    grid_init: str = "unit"
    readout_mode: str = "winner"
    snapshot_steps: typing.Optional[list] = None

    # evaluation and batch
    methods: list = field(default_factory=lambda: ["asom"])
    max_lag: int = 10
    n_runs: int = 50
    workers: int = 1
    backend: typing.Optional[str] = None

    def __post_init__(self):
        self.validate()

    @property
    def train_length(self):
        return self.n_train if self.n_train is not None else _SPLITS[self.family][0]

    @property
    def test_length(self):
        return self.n_test if self.n_test is not None else _SPLITS[self.family][1]

    @property
    def length(self):
        return self.train_length + self.test_length

    def schedule(self):
        return TrainingSchedule(self.N, self.K, self.sigma1_0, self.sigma2_0, self.sigma2_base,
                                self.epsilon_0, self.epsilon_base)

    def snapshots(self):
        """Outer steps at which grid snapshots are kept (default 0, N/100, N/10, N)."""
        if self.snapshot_steps is not None:
            return list(self.snapshot_steps)
        return sorted({0, self.N // 100, self.N // 10, self.N})

    def params(self):
        if self.family == "logistic":
            return LogisticTriadParams(self.r_z, self.r_x, self.r_y, self.beta_x, self.beta_y,
                                       self.noise_sd)
        return TentTriadParams(self.alpha_z, self.alpha_x, self.alpha_y, self.beta_x, self.beta_y)

    def validate(self):
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.family in FAMILIES, f"family must be one of {FAMILIES}")
        need(self.coupling in ("sugihara", "literal"), "coupling must be sugihara or literal")
        need(self.tent_argument in ("clip", "wrap", "none"), "tent_argument must be clip, wrap or none")
        need(self.grid_init in ("unit", "data"), "grid_init must be unit or data")
        need(self.readout_mode in ("winner", "bundle"), "readout_mode must be winner or bundle")
        need(self.backend in (None, "python", "cython"), "backend must be python or cython")
        unknown = [m for m in self.methods if m not in METHODS]
        need(not unknown and self.methods, f"methods must be drawn from {METHODS}")
        counts = ("burn_in", "dim_chunk", "dim_m", "dim_tau", "som_m", "som_tau", "n1", "n2", "N",
                  "K", "n_runs", "workers")
        for name in counts:
            minimum = 0 if name == "burn_in" else 1
            need(getattr(self, name) >= minimum, f"{name} must be >= {minimum}")
        need(self.max_restarts >= 0 and self.max_lag >= 0, "max_restarts and max_lag must be >= 0")
        need(self.train_length >= 1 and self.test_length >= 2, "n_train >= 1 and n_test >= 2 required")
        need(2 <= self.k_min <= self.k_max, "require 2 <= k_min <= k_max")
        need(self.relation_tol > 0, "relation_tol must be positive")
        need(self.dim_chunk <= self.train_length, "dim_chunk exceeds the training split")
        need(self.noise_sd >= 0, "noise_sd must be non-negative")
        need(self.som_shape == "auto" or _parse_shape(self.som_shape) is not None,
             "som_shape must be 'auto' or '<self>+<driver>'")
        steps = self.snapshots()
        need(all(0 <= s <= self.N for s in steps), "snapshot_steps must lie in 0..N")
        need(steps == sorted(set(steps)), "snapshot_steps must be strictly increasing")
        if self.init is not None:
            need(len(self.init) == 3 and all(0 <= v <= 1 for v in self.init),
                 "init needs three values in [0, 1]")
        try:
            self.params()
            self.schedule()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_text(self):
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                text = "none"
            elif isinstance(v, bool):
                text = "true" if v else "false"
            elif isinstance(v, list):
                text = ", ".join(str(x) for x in v)
            else:
                text = str(v)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"


def _parse_shape(text):
    parts = text.split("+")
    if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
        return None
    return int(parts[0]), int(parts[1])


_LIST_ITEM = {"init": float, "snapshot_steps": int, "methods": str}


def _convert(name, hint, raw):
    origin = typing.get_origin(hint)
    if origin is typing.Union:
        if raw.lower() == "none":
            return None
        hint = next(a for a in typing.get_args(hint) if a is not type(None))
    if hint is bool:
        if raw.lower() not in ("true", "false"):
            raise ConfigError(f"{name}: expected true or false, got {raw!r}")
        return raw.lower() == "true"
    if hint is list:
        item = _LIST_ITEM[name]
        return [_convert(name, item, p.strip()) for p in raw.split(",") if p.strip()]
    try:
        return hint(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {hint.__name__}") from exc


def parse_config(text, base=None):
    """Parse config text into an ``ExperimentConfig``; ``base`` supplies defaults."""
    hints = typing.get_type_hints(ExperimentConfig)
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (p.strip() for p in line.split("=", 1))
        if key not in hints:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, hints[key], raw)
    return replace(base, **values) if base is not None else ExperimentConfig(**values)


def load_config(path, base=None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base)
