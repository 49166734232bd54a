"""Discrete-time chaotic systems: coupled logistic and tilted tent maps.

Logistic coupling comes in two algebraic forms, selected with ``coupling``:

``"sugihara"`` (default)
    ``x' = x * (r - r*x - beta*z)``, the form used throughout the
    cross-mapping literature. The coupling term is not scaled by ``r``.
``"literal"``
    ``x' = r * x * (1 - x - beta*z)``. With couplings in the experiment range
    almost every trajectory leaves ``[0, 1]`` within a few hundred steps.

Tent-map couplings feed ``x + beta*z`` into the map, which can exceed the
unit interval. ``tent_argument`` decides what happens to it before the map is
applied: ``"clip"`` (default) clamps to ``[0, 1]``, ``"wrap"`` takes it
modulo 1, ``"none"`` passes it through unchanged.

When a trajectory leaves its domain (``[-1, 2]`` for logistic states,
``|state| > 10`` for tent states) it is restarted from fresh uniform initial
conditions drawn from the same seeded stream, up to ``max_restarts`` times.
Random draws per attempt, in order: the Box-Muller noise block (logistic
triad with ``noise_sd > 0`` only), then on failure three uniforms for the new
initial state ``(z, x, y)`` (two for pairs).
"""

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DivergenceError
from .rng import box_muller, generator

DEFAULT_BURN_IN = 1000
DEFAULT_MAX_RESTARTS = 100

_COUPLINGS = ("sugihara", "literal")
_TENT_ARGS = {"none": 0, "clip": 1, "wrap": 2}


@dataclass(frozen=True)
class LogisticTriadParams:
    """Driver ``z`` forcing ``x`` and ``y`` through ``beta_x``, ``beta_y``."""

    r_z: float
    r_x: float
    r_y: float
    beta_x: float
    beta_y: float
    noise_sd: float = 0.0

    def __post_init__(self):
        values = (self.r_z, self.r_x, self.r_y, self.beta_x, self.beta_y, self.noise_sd)
        if not all(np.isfinite(values)):
            raise ValueError("parameters must be finite")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")

    @classmethod
    def demo(cls):
        return cls(3.8, 3.8, 3.8, 0.4, 0.3, 0.001)

    def in_protocol_range(self):
        rs = (self.r_z, self.r_x, self.r_y)
        bs = (self.beta_x, self.beta_y)
        return all(3.8 <= r <= 4.0 for r in rs) and all(0.1 <= b <= 0.5 for b in bs)


@dataclass(frozen=True)
class TentTriadParams:
    alpha_z: float
    alpha_x: float
    alpha_y: float
    beta_x: float
    beta_y: float

    def __post_init__(self):
        for a in (self.alpha_z, self.alpha_x, self.alpha_y):
            if not 0.0 < a < 1.0:
                raise ValueError(f"tent peak position must lie in (0, 1), got {a}")
        if not all(np.isfinite((self.beta_x, self.beta_y))):
            raise ValueError("couplings must be finite")

    def in_protocol_range(self):
        alphas = (self.alpha_z, self.alpha_x, self.alpha_y)
        bs = (self.beta_x, self.beta_y)
        return all(0.1 <= a <= 0.5 for a in alphas) and all(0.1 <= b <= 1.0 for b in bs)


@dataclass(frozen=True)
class PairParams:
    """Two logistic maps; ``beta_forward`` couples x into y, ``beta_backward`` y into x."""

    r: float = 3.86
    beta_forward: float = 0.5
    beta_backward: float = 0.0

    def __post_init__(self):
        if self.beta_forward < 0 or self.beta_backward < 0:
            raise ValueError("couplings must be non-negative")

    @classmethod
    def unidirectional(cls):
        return cls(3.86, 0.5, 0.0)

    @classmethod
    def circular(cls):
        return cls(3.86, 0.6, 0.5)


@dataclass
class SimulationOutput:
    z: np.ndarray | None
    x: np.ndarray
    y: np.ndarray
    resample_count: int = 0

    def __len__(self):
        return len(self.x)

    def as_array(self):
        """Columns ``(z, x, y)``; ``z`` is NaN for pairs."""
        z = self.z if self.z is not None else np.full(len(self.x), np.nan)
        return np.column_stack([z, self.x, self.y])


def tent_tilted(x, alpha):
    """Tilted tent map with peak value 1 at ``alpha`` and zeros at 0 and 1.

    Works for scalars and arrays; arguments outside ``[0, 1]`` continue the
    two linear branches.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if np.ndim(x) == 0:
        x = float(x)
        return x / alpha if x < alpha else 1.0 - (x - alpha) / (1.0 - alpha)
    x = np.asarray(x, dtype=float)
    return np.where(x < alpha, x / alpha, 1.0 - (x - alpha) / (1.0 - alpha))


def _check_init(init, n):
    init = tuple(float(v) for v in init)
    if len(init) != n:
        raise ValueError(f"expected {n} initial values, got {len(init)}")
    if not all(0.0 <= v <= 1.0 for v in init):
        raise ValueError("initial conditions must lie in [0, 1]")
    return init


def _check_length(length, burn_in):
    if length < 1:
        raise ValueError("length must be at least 1")
    if burn_in < 0:
        raise ValueError("burn_in must be non-negative")


def _run_with_restarts(step, init, gen, max_restarts, what):
    state = init
    for attempt in range(max_restarts + 1):
        failed_at, result = step(state)
        if failed_at < 0:
            return result, attempt
        state = tuple(gen.random(len(init)))
    raise DivergenceError(f"{what} diverged on all {max_restarts + 1} attempts")


def logistic_triad_simulate(params, init, length, seed, burn_in=DEFAULT_BURN_IN,
                            coupling="sugihara", max_restarts=DEFAULT_MAX_RESTARTS,
                            backend=None):
    """Iterate the noisy hidden-driver logistic triad.

    Parameters
    ----------
    params : LogisticTriadParams
    init : sequence of 3 floats
        Initial ``(z, x, y)`` in ``[0, 1]``.
    length : int
        Number of recorded steps after the burn-in.
    seed : int
        Seed for the noise stream and restart draws.
    coupling : {"sugihara", "literal"}

    Returns
    -------
    SimulationOutput
    """
    if coupling not in _COUPLINGS:
        raise ValueError(f"coupling must be one of {_COUPLINGS}")
    _check_length(length, burn_in)
    init = _check_init(init, 3)
    kern = _backend.get_kernels(backend)
    gen = generator(seed)
    p = (params.r_z, params.r_x, params.r_y, params.beta_x, params.beta_y)
    total = burn_in + length

    def step(state):
        if params.noise_sd > 0:
            noise = box_muller(gen, 3 * total).reshape(total, 3) * params.noise_sd
        else:
            noise = np.zeros((total, 3))
        out = np.empty((length, 3))
        failed = kern.logistic_triad(p, state, noise, coupling == "literal", burn_in, out)
        return failed, out

    out, restarts = _run_with_restarts(step, init, gen, max_restarts, "logistic triad")
    return SimulationOutput(out[:, 0].copy(), out[:, 1].copy(), out[:, 2].copy(), restarts)


def logistic_pair_simulate(params=None, mode="unidirectional", init=(0.4, 0.2), length=10000,
                           seed=0, burn_in=DEFAULT_BURN_IN, coupling="sugihara",
                           max_restarts=DEFAULT_MAX_RESTARTS, backend=None):
    """Iterate a noiseless coupled logistic pair; ``z`` of the output is ``None``.

    ``mode="unidirectional"`` lets x drive y only (``beta_backward`` must be
    0); ``mode="circular"`` couples both ways.
    """
    if mode not in ("unidirectional", "circular"):
        raise ValueError("mode must be 'unidirectional' or 'circular'")
    if coupling not in _COUPLINGS:
        raise ValueError(f"coupling must be one of {_COUPLINGS}")
    if params is None:
        params = PairParams.unidirectional() if mode == "unidirectional" else PairParams.circular()
    if mode == "unidirectional" and params.beta_backward != 0:
        raise ValueError("unidirectional mode requires beta_backward == 0")
    _check_length(length, burn_in)
    init = _check_init(init, 2)
    kern = _backend.get_kernels(backend)
    gen = generator(seed)
    p = (params.r, params.beta_forward, params.beta_backward)

    def step(state):
        out = np.empty((length, 2))
        return kern.logistic_pair(p, state, coupling == "literal", burn_in, out), out

    out, restarts = _run_with_restarts(step, init, gen, max_restarts, "logistic pair")
    return SimulationOutput(None, out[:, 0].copy(), out[:, 1].copy(), restarts)


def tent_triad_simulate(params, init, length, seed, burn_in=DEFAULT_BURN_IN,
                        tent_argument="clip", max_restarts=DEFAULT_MAX_RESTARTS,
                        backend=None):
    """Iterate the noiseless hidden-driver triad of tilted tent maps."""
    if tent_argument not in _TENT_ARGS:
        raise ValueError(f"tent_argument must be one of {tuple(_TENT_ARGS)}")
    _check_length(length, burn_in)
    init = _check_init(init, 3)
    kern = _backend.get_kernels(backend)
    gen = generator(seed)
    p = (params.alpha_z, params.alpha_x, params.alpha_y, params.beta_x, params.beta_y)
    mode = _TENT_ARGS[tent_argument]

    def step(state):
        out = np.empty((length, 3))
        return kern.tent_triad(p, state, mode, burn_in, out), out

    out, restarts = _run_with_restarts(step, init, gen, max_restarts, "tent triad")
    return SimulationOutput(out[:, 0].copy(), out[:, 1].copy(), out[:, 2].copy(), restarts)


def sample_experiment_params(family, seed):
    """Draw one random experiment from the batch protocol.

    Draw order (all uniform, one PCG64 stream seeded with ``seed``):
    logistic ``r_z, r_x, r_y`` in [3.8, 4], ``beta_x, beta_y`` in [0.1, 0.5];
    tent ``alpha_z, alpha_x, alpha_y`` in [0.1, 0.5], ``beta_x, beta_y`` in
    [0.1, 1]; then the initial ``z, x, y`` in [0, 1].

    Returns
    -------
    (params, init)
    """
    gen = generator(seed)
    if family == "logistic":
        r = gen.uniform(3.8, 4.0, 3)
        b = gen.uniform(0.1, 0.5, 2)
        params = LogisticTriadParams(*map(float, r), *map(float, b), noise_sd=0.0)
    elif family == "tent":
        a = gen.uniform(0.1, 0.5, 3)
        b = gen.uniform(0.1, 1.0, 2)
        params = TentTriadParams(*map(float, a), *map(float, b))
    else:
        raise ValueError(f"unknown family {family!r}")
    init = tuple(float(v) for v in gen.uniform(0.0, 1.0, 3))
    return params, init


def simulate(family, params, init, length, seed, burn_in=DEFAULT_BURN_IN, coupling="sugihara",
             tent_argument="clip", max_restarts=DEFAULT_MAX_RESTARTS, backend=None):
    """Dispatch to the triad simulator for ``family``."""
    if family == "logistic":
        return logistic_triad_simulate(params, init, length, seed, burn_in, coupling,
                                       max_restarts, backend)
    if family == "tent":
        return tent_triad_simulate(params, init, length, seed, burn_in, tent_argument,
                                   max_restarts, backend)
    raise ValueError(f"unknown family {family!r}")
