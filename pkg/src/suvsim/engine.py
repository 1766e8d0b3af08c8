"""Deterministic vectorized ensemble execution.

Trajectories are integrated in lockstep over chunks of the ensemble, but
every per-trajectory quantity is a pure function of (master seed,
trajectory index): each trajectory owns a private counter-based stream,
and its draw order is fixed by scheme and noise kind:

* colored schemes: one steady-state draw for the initial field value
  (standard normal for OU kinds, uniform for SBM kinds), then one standard
  normal per step for evolving kinds (frozen kinds draw nothing further);
* Wiener-driven schemes: one standard normal per step (scaled by sqrt(dt)).

Ensemble statistics are folded one trajectory at a time, in index order,
with compensated summation. Together these make every output bitwise
independent of chunk size and of how many trajectories run concurrently,
and byte-identical across repeated runs of the same configuration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    Scheme,
    TrajectoryConfig,
    _renormalize,
    _sse_em,
    _suv_heun,
    _unnormalized_heun,
    _white_ito_em,
    _white_strat_heun,
    _z_colored_heun,
    _z_white_heun,
)
from .errors import IntegratorInstabilityError, InvalidParameterError
from .noise import NoiseKind, _ou_coefficients, _ou_update, _sbm_update
from .observables import CompensatedAccumulator, EnsembleSummary

__all__ = ["EnsembleResult", "derive_stream", "simulate_ensemble"]

# Upper bound on elements of the per-chunk draw matrix; bounds peak memory.
_CHUNK_ELEMENT_BUDGET = 20_000_000


def derive_stream(master_seed: int, trajectory_index: int) -> np.random.Generator:
    """Private random stream for one trajectory.

    Streams come from a counter-based generator keyed on (seed, index), so
    they are statistically independent across indices, reproducible, and
    independent of execution order.
    """
    if master_seed < 0:
        raise InvalidParameterError(f"master_seed must be nonnegative, got {master_seed}")
    if trajectory_index < 0:
        raise InvalidParameterError(
            f"trajectory_index must be nonnegative, got {trajectory_index}"
        )
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(trajectory_index,))
    return np.random.Generator(np.random.Philox(seq))


@dataclass
class EnsembleResult:
    """Outputs of one ensemble run.

    summary is None when time series were not recorded; single_z/single_xi
    hold the decimated trajectory dump when the ensemble has exactly one
    trajectory (single_xi is None for schemes without a colored field).
    """

    config: TrajectoryConfig
    n_traj: int
    final_z: np.ndarray
    summary: EnsembleSummary | None = None
    single_z: np.ndarray | None = None
    single_xi: np.ndarray | None = None


def simulate_ensemble(
    cfg: TrajectoryConfig,
    n_traj: int,
    decimation: int = 10,
    index_offset: int = 0,
    chunk_size: int | None = None,
    record_series: bool = True,
    collect_qv: bool = True,
) -> EnsembleResult:
    """Run an ensemble of trajectories and reduce it deterministically.

    Parameters
    ----------
    cfg : TrajectoryConfig
        Scheme, physics, grid and master seed.
    n_traj : int
        Ensemble size; trajectory i uses the stream derived from
        (cfg.seed, index_offset + i).
    decimation : int
        Statistics are emitted every ``decimation`` steps (plus the final
        step); internal updates still happen every step.
    index_offset : int
        Offset of the stream indices, used to draw disjoint independent
        ensembles under one master seed.
    chunk_size : int, optional
        Trajectories integrated per lockstep batch. Affects memory and
        speed only; results are bitwise identical for any value.
    record_series : bool
        Record time series (means, stderrs, quadratic variation). Off for
        distribution-only runs, which keeps just the final z values.
    collect_qv : bool
        Accumulate the quadratic-variation series (requires record_series).
    """
    if n_traj < 1:
        raise InvalidParameterError(f"n_traj must be at least 1, got {n_traj}")
    if decimation < 1:
        raise InvalidParameterError(f"decimation must be at least 1, got {decimation}")
    if index_offset < 0:
        raise InvalidParameterError(f"index_offset must be nonnegative, got {index_offset}")
    if cfg.scheme.uses_colored_noise and cfg.noise.kind is NoiseKind.NONE:
        raise InvalidParameterError(
            f"scheme {cfg.scheme.value!r} is driven by a colored field and needs a "
            "noise process, got kind 'none'"
        )

    n_steps = cfg.n_steps
    record_at = np.zeros(n_steps + 1, dtype=bool)
    if record_series:
        record_at[::decimation] = True
        record_at[n_steps] = True
    out_idx = np.flatnonzero(record_at)
    times = out_idx * cfg.dt
    n_out = out_idx.size

    collect_qv = collect_qv and record_series
    if record_series:
        acc_z = CompensatedAccumulator(n_out)
        acc_z2 = CompensatedAccumulator(n_out)
        acc_off = CompensatedAccumulator(n_out)
        acc_off2 = CompensatedAccumulator(n_out)
    if collect_qv:
        acc_dq = CompensatedAccumulator(n_steps)

    final_z = np.empty(n_traj)
    single_z = single_xi = None

    if chunk_size is None:
        chunk_size = max(1, min(n_traj, _CHUNK_ELEMENT_BUDGET // max(n_steps, 1)))
    elif chunk_size < 1:
        raise InvalidParameterError(f"chunk_size must be at least 1, got {chunk_size}")

    for start in range(0, n_traj, chunk_size):
        m = min(chunk_size, n_traj - start)
        streams = [derive_stream(cfg.seed, index_offset + start + i) for i in range(m)]
        z_rows, off_rows, dq_rows, xi_rows, fz = _integrate_chunk(
            cfg,
            streams,
            record_at,
            need_qv=collect_qv,
            need_xi=(n_traj == 1),
        )
        final_z[start : start + m] = fz
        if record_series:
            acc_z.add_rows(z_rows)
            acc_z2.add_rows(z_rows * z_rows)
            acc_off.add_rows(off_rows)
            acc_off2.add_rows(off_rows * off_rows)
        if collect_qv:
            acc_dq.add_rows(dq_rows)
        if n_traj == 1 and record_series:
            single_z = z_rows[0].copy()
            single_xi = None if xi_rows is None else xi_rows[0].copy()

    summary = None
    if record_series:
        mean_z = acc_z.total / n_traj
        mean_off = acc_off.total / n_traj
        if n_traj > 1:
            stderr_z = _stderr(acc_z.total, acc_z2.total, n_traj)
            stderr_off = _stderr(acc_off.total, acc_off2.total, n_traj)
        else:
            stderr_z = stderr_off = None
        if collect_qv:
            step_means = np.maximum(acc_dq.total / n_traj, 0.0)
            qv_all = np.cumsum(np.concatenate(([0.0], step_means)))
            qv = qv_all[out_idx]
        else:
            qv = np.zeros(n_out)
        summary = EnsembleSummary(
            times=times,
            mean_z=mean_z,
            mean_offdiag=mean_off,
            qv=qv,
            n_traj=n_traj,
            stderr_z=stderr_z,
            stderr_offdiag=stderr_off,
        )

    return EnsembleResult(
        config=cfg,
        n_traj=n_traj,
        final_z=final_z,
        summary=summary,
        single_z=single_z,
        single_xi=single_xi,
    )


def _stderr(s1: np.ndarray, s2: np.ndarray, n: int) -> np.ndarray:
    """Standard error of the mean from compensated sums of x and x^2."""
    var = np.clip((s2 - s1 * s1 / n) / (n - 1), 0.0, None)
    return np.sqrt(var / n)


def _integrate_chunk(cfg, streams, record_at, need_qv, need_xi):
    """Integrate one lockstep batch; returns per-trajectory series and finals."""
    scheme = cfg.scheme
    p = cfg.params
    dt = cfg.dt
    n_steps = cfg.n_steps
    m = len(streams)
    record_series = bool(record_at.any())
    n_out = int(record_at.sum())

    colored = scheme.uses_colored_noise
    kind = cfg.noise.kind
    xi = normals = dws = None
    if colored:
        xi = np.empty(m)
        if kind.is_bounded:
            for r, g in enumerate(streams):
                xi[r] = g.uniform(-1.0, 1.0)
        else:
            for r, g in enumerate(streams):
                xi[r] = g.standard_normal()
        if kind.is_evolving:
            normals = np.empty((m, n_steps))
            for r, g in enumerate(streams):
                normals[r] = g.standard_normal(n_steps)
            if kind is NoiseKind.OU:
                ou_decay, ou_sigma = _ou_coefficients(dt, cfg.noise.tau)
    else:
        dws = np.empty((m, n_steps))
        for r, g in enumerate(streams):
            dws[r] = g.standard_normal(n_steps)
        dws *= math.sqrt(dt)

    scalar = scheme.is_scalar
    if scalar:
        z = np.full(m, cfg.z0)
        alpha = np.sqrt(z)
    else:
        a = np.full(m, math.sqrt(cfg.z0))
        b = np.full(m, math.sqrt(1.0 - cfg.z0))

    z_rows = np.empty((m, n_out)) if record_series else None
    off_rows = np.empty((m, n_out)) if record_series else None
    dq_rows = np.empty((m, n_steps)) if need_qv else None
    xi_rows = np.empty((m, n_out)) if (need_xi and colored and record_series) else None

    unnormalized = scheme is Scheme.UNNORMALIZED_SUV

    def observe(pos):
        if scalar:
            z_rows[:, pos] = z
            off_rows[:, pos] = alpha * np.sqrt(1.0 - z)
        elif unnormalized:
            nrm2 = a * a + b * b
            z_rows[:, pos] = a * a / nrm2
            off_rows[:, pos] = a * b / nrm2
        else:
            z_rows[:, pos] = a * a
            off_rows[:, pos] = a * b
        if xi_rows is not None:
            xi_rows[:, pos] = xi

    pos = 0
    if record_series and record_at[0]:
        observe(pos)
        pos += 1

    for k in range(n_steps):
        if need_qv:
            prev_alpha = alpha if scalar else a
        if scheme is Scheme.SUV_COLORED:
            a, b = _suv_heun(a, b, xi, dt, p.J, p.G)
            a, b = _renormalize(a, b)
        elif scheme is Scheme.UNNORMALIZED_SUV:
            a, b = _unnormalized_heun(a, b, xi, dt, p.J, p.G)
            if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
                raise IntegratorInstabilityError("unnormalized amplitudes overflowed")
        elif scheme is Scheme.SSE:
            a, b = _sse_em(a, b, dws[:, k], dt, p.gamma)
            a, b = _renormalize(a, b)
        elif scheme is Scheme.WHITE_STRAT:
            a, b = _white_strat_heun(a, b, dws[:, k], dt, p.J, p.Deff)
            a, b = _renormalize(a, b)
        elif scheme is Scheme.WHITE_ITO:
            a, b = _white_ito_em(a, b, dws[:, k], dt, p.J, p.Deff)
            a, b = _renormalize(a, b)
        elif scheme is Scheme.Z_COLORED:
            z = _z_colored_heun(z, xi, dt, p.J, p.G)
            alpha = np.sqrt(z)
        else:
            z = _z_white_heun(z, dws[:, k], dt, p.J, p.Deff)
            alpha = np.sqrt(z)

        if colored and kind.is_evolving:
            if kind is NoiseKind.OU:
                xi = _ou_update(xi, ou_decay, ou_sigma, normals[:, k])
            else:
                xi = _sbm_update(xi, dt, cfg.noise.tau, normals[:, k])

        if need_qv:
            delta = (alpha if scalar else a) - prev_alpha
            dq_rows[:, k] = delta * delta

        if record_series and record_at[k + 1]:
            observe(pos)
            pos += 1

    if scalar:
        fz = z.copy()
    elif unnormalized:
        fz = a * a / (a * a + b * b)
    else:
        fz = a * a
    return z_rows, off_rows, dq_rows, xi_rows, fz
