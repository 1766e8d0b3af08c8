"""Colored-noise processes driving the trajectory dynamics.

Two mean-reverting processes with correlation time tau are provided, plus
frozen (constant-per-trajectory) variants of each:

* OU (Ornstein-Uhlenbeck):   d xi = -xi/tau dt + sqrt(2/tau) dW
  Steady state N(0, 1); autocorrelation E[xi_t xi_s] = exp(-|t-s|/tau).
  Stepped with the exact Gaussian transition kernel,
      xi' = xi e^(-dt/tau) + sqrt(1 - e^(-2 dt/tau)) n,   n ~ N(0, 1),
  so the noise channel carries no dt bias and all discretization error
  is attributable to the state integrator.

* SBM (spherical Brownian motion, the polar cosine of Brownian motion on
  the unit sphere, closed in xi = cos theta):
      d xi = -xi/tau dt + sqrt((1 - xi^2)/tau) dW   (Ito)
  Steady state uniform on [-1, 1] (E[xi^2] = 1/3); autocorrelation
  (1/3) exp(-|t-s|/tau). Stepped with Euler-Maruyama and a hard clamp to
  [-1, 1]: the diffusion coefficient vanishes at the boundary, so
  overshoot is an O(sqrt(dt))-rare discretization artifact.

Initial values are drawn from the steady state unless an explicit sharp
initial condition is supplied (relaxation tests only).

Every stepper is a pure function of (state, parameters, rng draw); each
trajectory owns a private random stream, so any number of trajectories can
run concurrently with no shared mutable state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidParameterError, NotApplicableError, StateCorruptionError

__all__ = [
    "NoiseKind",
    "NoiseModel",
    "NoiseState",
    "wiener_increment",
    "ou_step",
    "sbm_step",
    "sample_steady_state",
    "steady_samples",
    "autocorrelation",
    "simulate_paths",
]


class NoiseKind(str, Enum):
    """Available noise processes; frozen kinds hold a single steady-state draw."""

    OU = "ou"
    SBM = "sbm"
    FROZEN_OU = "frozen-ou"
    FROZEN_SBM = "frozen-sbm"
    NONE = "none"

    @property
    def is_frozen(self) -> bool:
        return self in (NoiseKind.FROZEN_OU, NoiseKind.FROZEN_SBM)

    @property
    def is_evolving(self) -> bool:
        return self in (NoiseKind.OU, NoiseKind.SBM)

    @property
    def is_bounded(self) -> bool:
        """SBM-family kinds keep |xi| <= 1 at all times."""
        return self in (NoiseKind.SBM, NoiseKind.FROZEN_SBM)


@dataclass(frozen=True)
class NoiseModel:
    """A noise process selection with its correlation time.

    Parameters
    ----------
    kind : NoiseKind
        Process family. ``tau`` is ignored for frozen and none kinds.
    tau : float
        Correlation time, required positive for evolving kinds.
    """

    kind: NoiseKind
    tau: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.kind, NoiseKind):
            object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.kind.is_evolving and not self.tau > 0:
            raise InvalidParameterError(
                f"tau must be positive for {self.kind.value} noise, got {self.tau}"
            )


@dataclass(frozen=True)
class NoiseState:
    """Instantaneous value of the scalar stochastic field."""

    xi: float
    t: float = 0.0


def wiener_increment(dt: float, rng) -> float:
    """Draw a Wiener increment, a zero-mean Gaussian with variance dt.

    Parameters
    ----------
    dt : float
        Time step, positive.
    rng : numpy.random.Generator
        Source of standard normal draws.
    """
    if not dt > 0:
        raise InvalidParameterError(f"dt must be positive, got {dt}")
    return math.sqrt(dt) * float(rng.standard_normal())


def _ou_coefficients(dt: float, tau: float) -> tuple[float, float]:
    """Decay factor and innovation scale of the exact OU transition kernel."""
    decay = math.exp(-dt / tau)
    return decay, math.sqrt(1.0 - decay * decay)


def _ou_update(xi, decay, sigma, normals):
    """Exact OU transition, vectorized over trajectories."""
    return xi * decay + sigma * normals


def _sbm_update(xi, dt, tau, normals):
    """One Euler-Maruyama SBM step with boundary clamp, vectorized."""
    ratio = dt / tau
    xi_new = xi - xi * ratio + np.sqrt(np.clip(1.0 - xi * xi, 0.0, None) * ratio) * normals
    return np.clip(xi_new, -1.0, 1.0)


def ou_step(state: NoiseState, dt: float, tau: float, rng) -> NoiseState:
    """Advance an OU field by dt with the exact Gaussian transition.

    The update is xi' = xi e^(-dt/tau) + sqrt(1 - e^(-2 dt/tau)) n with n a
    standard normal draw from ``rng``; the conditional law is exact for any
    dt, so repeated steps sample the continuous-time process without bias.
    """
    if not dt > 0:
        raise InvalidParameterError(f"dt must be positive, got {dt}")
    if not tau > 0:
        raise InvalidParameterError(f"tau must be positive, got {tau}")
    decay, sigma = _ou_coefficients(dt, tau)
    xi = state.xi * decay + sigma * float(rng.standard_normal())
    return NoiseState(xi=xi, t=state.t + dt)


def sbm_step(state: NoiseState, dt: float, tau: float, rng) -> NoiseState:
    """Advance an SBM field by dt with Euler-Maruyama, clamped to [-1, 1].

    The Ito step is xi' = xi - xi dt/tau + sqrt((1 - xi^2)/tau) dW. The
    diffusion coefficient vanishes at |xi| = 1, so the clamp only removes
    rare discretization overshoot.
    """
    if not dt > 0:
        raise InvalidParameterError(f"dt must be positive, got {dt}")
    if not tau > 0:
        raise InvalidParameterError(f"tau must be positive, got {tau}")
    if abs(state.xi) > 1.0:
        raise StateCorruptionError(f"SBM field out of range: xi = {state.xi}")
    xi = float(_sbm_update(state.xi, dt, tau, float(rng.standard_normal())))
    return NoiseState(xi=xi, t=state.t + dt)


def sample_steady_state(model: NoiseModel, rng) -> NoiseState:
    """Draw one value from the steady-state law of the given process.

    OU-family kinds draw from N(0, 1); SBM-family kinds draw uniformly on
    [-1, 1]. Frozen kinds use this single draw for the whole trajectory.
    """
    kind = model.kind
    if kind in (NoiseKind.OU, NoiseKind.FROZEN_OU):
        return NoiseState(xi=float(rng.standard_normal()), t=0.0)
    if kind in (NoiseKind.SBM, NoiseKind.FROZEN_SBM):
        return NoiseState(xi=float(rng.uniform(-1.0, 1.0)), t=0.0)
    raise NotApplicableError(f"no steady state defined for noise kind {kind.value!r}")


def steady_samples(model: NoiseModel, n: int, rng) -> np.ndarray:
    """Draw n independent steady-state values from one stream.

    Distribution matches :func:`sample_steady_state`: N(0, 1) for OU-family
    kinds, uniform on [-1, 1] for SBM-family kinds.
    """
    if n < 1:
        raise InvalidParameterError(f"n must be positive, got {n}")
    kind = model.kind
    if kind in (NoiseKind.OU, NoiseKind.FROZEN_OU):
        return rng.standard_normal(n)
    if kind in (NoiseKind.SBM, NoiseKind.FROZEN_SBM):
        return rng.uniform(-1.0, 1.0, n)
    raise NotApplicableError(f"no steady state defined for noise kind {kind.value!r}")


def autocorrelation(paths, lag: float, dt: float) -> float:
    """Stationary autocovariance estimate E[xi_t xi_(t+lag)] - E[xi]^2.

    Averages over trajectories and over all time origins of steady-state
    paths sampled on a uniform grid of spacing dt.

    Parameters
    ----------
    paths : array_like, shape (n_traj, n_times)
        Noise paths started in the steady state.
    lag : float
        Nonnegative lag, an integer multiple of dt.
    dt : float
        Grid spacing of the paths.
    """
    arr = np.asarray(paths, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidParameterError("paths must be a nonempty (n_traj, n_times) array")
    if lag < 0:
        raise InvalidParameterError(f"lag must be nonnegative, got {lag}")
    if not dt > 0:
        raise InvalidParameterError(f"dt must be positive, got {dt}")
    k_real = lag / dt
    k = int(round(k_real))
    if abs(k_real - k) > 1e-9 * max(1.0, abs(k_real)):
        raise InvalidParameterError(f"lag {lag} is not a multiple of dt {dt}")
    if k >= arr.shape[1]:
        raise InvalidParameterError(
            f"lag of {k} steps exceeds path length {arr.shape[1]}"
        )
    x = arr[:, : arr.shape[1] - k] if k else arr
    y = arr[:, k:]
    return float(np.mean(x * y) - np.mean(x) * np.mean(y))


def simulate_paths(model: NoiseModel, n_steps: int, dt: float, streams, xi0=None):
    """Generate noise paths, one per random stream.

    Each path draws only from its own stream, in a fixed order (initial
    value first, then one normal per step), so a path is a pure function of
    (stream seed, model, dt, n_steps) regardless of how many other paths
    are generated alongside it.

    Parameters
    ----------
    model : NoiseModel
        Process to simulate; frozen kinds yield constant paths.
    n_steps : int
        Number of steps; output has n_steps + 1 columns including t = 0.
    dt : float
        Time step.
    streams : sequence of numpy.random.Generator
        One private stream per path.
    xi0 : float or array_like, optional
        Sharp initial condition override; by default the initial value is a
        steady-state draw from each stream.

    Returns
    -------
    numpy.ndarray, shape (len(streams), n_steps + 1)
    """
    if model.kind is NoiseKind.NONE:
        raise NotApplicableError("cannot simulate paths for noise kind 'none'")
    if n_steps < 0:
        raise InvalidParameterError(f"n_steps must be nonnegative, got {n_steps}")
    if not dt > 0:
        raise InvalidParameterError(f"dt must be positive, got {dt}")
    streams = list(streams)
    n = len(streams)
    if n == 0:
        raise InvalidParameterError("at least one random stream is required")

    if xi0 is None:
        xi = np.array([sample_steady_state(model, g).xi for g in streams])
    else:
        xi = np.broadcast_to(np.asarray(xi0, dtype=float), (n,)).copy()
        if model.kind.is_bounded and np.any(np.abs(xi) > 1.0):
            raise StateCorruptionError("SBM initial condition outside [-1, 1]")

    out = np.empty((n, n_steps + 1))
    out[:, 0] = xi
    if model.kind.is_frozen:
        out[:, 1:] = xi[:, None]
        return out

    normals = np.empty((n, n_steps)) if n_steps else np.empty((n, 0))
    for row, g in enumerate(streams):
        normals[row] = g.standard_normal(n_steps)

    if model.kind is NoiseKind.OU:
        decay, sigma = _ou_coefficients(dt, model.tau)
        for k in range(n_steps):
            xi = _ou_update(xi, decay, sigma, normals[:, k])
            out[:, k + 1] = xi
    else:
        for k in range(n_steps):
            xi = _sbm_update(xi, dt, model.tau, normals[:, k])
            out[:, k + 1] = xi
    return out
