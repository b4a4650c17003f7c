"""End-to-end Mach-Zehnder pipeline, phase estimators and shot simulation.

Circuit, acting on the all-left input ``basis_state(N, 0)``:

1. first beamsplitter, rotation about ``y`` by ``pi/2``;
2. squeezer, followed by an alignment rotation about ``x`` that turns the
   narrow axis onto ``y``;
3. sample phase, rotation about ``z`` by ``phi``;
4. second beamsplitter, rotation about ``x`` by ``pi/2``, which maps the
   ``y`` quadrature onto the detected ``S_z = (n_L - n_R)/2``.

Squeezed and offset states are read out with a locally calibrated linear
estimator ``phi_hat = (S_z - mu0(h)) / s(h)``.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional, Union

import numpy as np

from .dicke import (
    DickeState,
    _moment_arrays,
    basis_state,
    coherent_state,
    m_values,
    phase_shift,
    rotate,
    rotation_matrix,
)
from .exceptions import DomainError, UninformativeReadoutError
from .squeezers import (
    MeasConfig,
    OATConfig,
    _sample_h,
    ghz_axis,
    h_quadrature,
    kraus_apply,
    kraus_weights,
    oat_alignment_angle,
    oat_apply,
)

__all__ = [
    "MZISpec",
    "ShotRecord",
    "Calibration",
    "MonteCarloResult",
    "run_pipeline",
    "estimator_arcsin",
    "calibrate",
    "monte_carlo",
    "write_shots_csv",
    "parity_expectation",
    "parity_fringe",
    "parity_phase_uncertainty",
    "default_workers",
]

Squeezer = Union[None, OATConfig, MeasConfig]

CAL_STEP = 1e-4
MIN_SLOPE = 1e-9
BLOCK_SIZE = 8192


@dataclass(frozen=True)
class MZISpec:
    """Interferometer layout. ``squeezer=None`` is the unsqueezed circuit."""

    n_electrons: int
    squeezer: Squeezer = None
    true_phase: float = 0.0
    apply_alignment: bool = True

    def __post_init__(self):
        if int(self.n_electrons) != self.n_electrons or self.n_electrons < 1:
            raise DomainError(f"n_electrons must be a positive integer, got {self.n_electrons!r}")
        if not abs(self.true_phase) < math.pi / 2:
            raise DomainError(f"true_phase must satisfy |phi| < pi/2, got {self.true_phase!r}")
        if self.squeezer is not None and not isinstance(self.squeezer, (OATConfig, MeasConfig)):
            raise DomainError(f"unsupported squeezer {self.squeezer!r}")

    @property
    def kind(self) -> str:
        if self.squeezer is None or self.squeezer.chi == 0:
            return "none"
        return self.squeezer.kind

    def with_phase(self, phi: float) -> "MZISpec":
        return MZISpec(self.n_electrons, self.squeezer, phi, self.apply_alignment)


@dataclass(frozen=True)
class ShotRecord:
    shot_index: int
    h: Optional[float]
    n_l: int
    n_r: int
    phi_hat: float


@dataclass(frozen=True)
class Calibration:
    """Linear readout model ``<S_z> ~ offset + slope * phi`` near ``phi = 0``."""

    offset: float
    slope: float

    def estimate(self, s_z):
        return (np.asarray(s_z, dtype=float) - self.offset) / self.slope


def _align_to_z(state: DickeState, axis: np.ndarray) -> DickeState:
    """Rotate so that ``axis`` points along ``+z``."""
    cos_t = float(np.clip(axis[2], -1.0, 1.0))
    pivot = np.cross(axis, [0.0, 0.0, 1.0])
    if np.linalg.norm(pivot) < 1e-12:
        return state if cos_t > 0 else rotate(state, "x", math.pi)
    return rotate(state, pivot, math.acos(cos_t))


def _prepare(spec: MZISpec, h: Optional[float]) -> DickeState:
    """State after beamsplitter 1, the squeezer and the alignment rotation."""
    n = spec.n_electrons
    state = rotate(basis_state(n, 0), "y", math.pi / 2)
    kind = spec.kind
    if kind == "interaction":
        chi = spec.squeezer.chi_int
        state = oat_apply(state, spec.squeezer)
        if spec.apply_alignment and n >= 2:
            mean, _ = _moment_arrays(state.amplitudes)
            if np.linalg.norm(mean) <= 1e-9 * n:
                # GHZ-like: put the superposition axis on z, the parity frame
                state = _align_to_z(state, ghz_axis(state))
            else:
                state = rotate(state, "x", oat_alignment_angle(state, chi))
    elif kind == "measurement":
        if h is None:
            raise DomainError("measurement squeezer needs a detector reading h")
        state = kraus_apply(state, spec.squeezer, h).post_state
        if spec.apply_alignment:
            state = rotate(state, "x", math.pi / 2)
    return state


def run_pipeline(spec: MZISpec, h: Optional[float] = None) -> DickeState:
    """Pre-detection state of the full circuit at ``spec.true_phase``."""
    state = phase_shift(_prepare(spec, h), spec.true_phase)
    return rotate(state, "x", math.pi / 2)


def estimator_arcsin(n_l, n_r, n, return_flag: bool = False):
    """Invert ``S_z = (N/2) sin(phi)`` for a measured count.

    The ratio ``(n_L - n_R)/N`` is clamped to ``[-1, 1]``; with
    ``return_flag=True`` the result is ``(phi_hat, clamped)``.
    """
    n_l = np.asarray(n_l)
    n_r = np.asarray(n_r)
    if n < 1 or np.any(n_l < 0) or np.any(n_r < 0):
        raise DomainError("counts must be non-negative and N >= 1")
    ratio = (n_l - n_r) / n
    clipped = np.clip(ratio, -1.0, 1.0)
    phi = np.arcsin(clipped)
    clamped = np.any(clipped != ratio)
    if phi.ndim == 0:
        phi = float(phi)
    return (phi, bool(clamped)) if return_flag else phi


def _final_sz(spec: MZISpec, prepared: DickeState, phi: float) -> float:
    final = rotate(phase_shift(prepared, phi), "x", math.pi / 2)
    return float(np.abs(final.amplitudes) ** 2 @ m_values(spec.n_electrons))


def calibrate(spec: MZISpec, h: Optional[float] = None) -> Calibration:
    """Offset and slope of the mean readout at ``phi = 0``.

    The slope is a central difference over ``phi = +-1e-4``.
    """
    prepared = _prepare(spec, h)
    offset = _final_sz(spec, prepared, 0.0)
    slope = (_final_sz(spec, prepared, CAL_STEP) - _final_sz(spec, prepared, -CAL_STEP)) / (2 * CAL_STEP)
    if abs(slope) < MIN_SLOPE:
        raise UninformativeReadoutError(f"readout slope {slope:.3g} is too small to invert")
    return Calibration(offset, slope)


class _MeasPipeline:
    """Batched circuit for the measurement squeezer, vectorized over ``h``."""

    def __init__(self, spec: MZISpec):
        n = spec.n_electrons
        self.spec = spec
        self.cfg: MeasConfig = spec.squeezer
        self.m = m_values(n)
        self.start = coherent_state(n)
        align = rotation_matrix(n, "x", math.pi / 2) if spec.apply_alignment else np.eye(n + 1)
        bs2 = rotation_matrix(n, "x", math.pi / 2)

        def circuit(phi):
            return bs2 @ (np.exp(-1j * phi * self.m)[:, None] * align)

        self.circuit = circuit(spec.true_phase)
        self._cal_circuits = [circuit(p) for p in (0.0, CAL_STEP, -CAL_STEP)]
        nodes, _ = h_quadrature(n, self.cfg)
        self.grid = nodes
        self.grid_offset, self.grid_slope = self._calibration(nodes)

    def _conditioned(self, h):
        b = kraus_weights(self.spec.n_electrons, self.cfg, h) * self.start.amplitudes
        return b / np.linalg.norm(b, axis=-1, keepdims=True)

    def _calibration(self, h):
        post = self._conditioned(h)
        sz = [np.abs(post @ u.T) ** 2 @ self.m for u in self._cal_circuits]
        return sz[0], (sz[1] - sz[2]) / (2 * CAL_STEP)

    def calibration(self, h):
        h = np.asarray(h, dtype=float)
        offset = np.interp(h, self.grid, self.grid_offset)
        slope = np.interp(h, self.grid, self.grid_slope)
        outside = (h < self.grid[0]) | (h > self.grid[-1])
        if outside.any():
            offset[outside], slope[outside] = self._calibration(h[outside])
        if np.any(np.abs(slope) < MIN_SLOPE):
            raise UninformativeReadoutError("readout slope vanishes for a sampled outcome")
        return offset, slope

    def final_probabilities(self, h):
        return np.abs(self._conditioned(h) @ self.circuit.T) ** 2


@dataclass(frozen=True)
class MonteCarloResult:
    n_electrons: int
    rms_error: float
    bias: float
    stderr: float
    true_phase: float
    h: Optional[np.ndarray]
    n_r: np.ndarray
    phi_hat: np.ndarray

    @property
    def n_l(self) -> np.ndarray:
        return self.n_electrons - self.n_r

    def records(self) -> Iterator[ShotRecord]:
        for i in range(self.n_r.size):
            h = None if self.h is None else float(self.h[i])
            n_r = int(self.n_r[i])
            yield ShotRecord(i, h, self.n_electrons - n_r, n_r, float(self.phi_hat[i]))


def _sample_counts(prob: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One ``n_R`` draw per row of ``prob`` by inverse-CDF sampling."""
    cdf = np.cumsum(prob, axis=-1)
    u = rng.random(prob.shape[:-1]) * cdf[..., -1]
    return np.minimum((cdf < u[..., None]).sum(axis=-1), prob.shape[-1] - 1)


def _run_block(spec, ctx, size, seed, block):
    rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
    n = spec.n_electrons
    if spec.kind == "measurement":
        h = _sample_h(ctx.start, ctx.cfg, rng, size)
        n_r = _sample_counts(ctx.final_probabilities(h), rng)
        offset, slope = ctx.calibration(h)
    else:
        prob, cal = ctx
        h = None
        n_r = rng.choice(n + 1, size=size, p=prob)
        offset, slope = cal.offset, cal.slope
    phi_hat = ((n / 2 - n_r) - offset) / slope
    return h, n_r, phi_hat


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SPINSQUEEZE_WORKERS", "1")))
    except ValueError:
        return 1


def monte_carlo(spec: MZISpec, shots: int, seed: int = 0, workers: Optional[int] = None) -> MonteCarloResult:
    """Simulate ``shots`` repetitions and score the calibrated estimator.

    Shots are drawn in fixed-size blocks, each with its own random stream
    derived from ``(seed, block index)``, so the result is identical for any
    number of ``workers``.
    """
    if int(shots) != shots or shots < 1:
        raise DomainError(f"shots must be a positive integer, got {shots!r}")
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise DomainError("workers must be >= 1")
    if spec.kind == "measurement":
        ctx = _MeasPipeline(spec)
    else:
        final = run_pipeline(spec)
        prob = np.abs(final.amplitudes) ** 2
        ctx = (prob / prob.sum(), calibrate(spec.with_phase(0.0)))
    sizes = [min(BLOCK_SIZE, shots - start) for start in range(0, shots, BLOCK_SIZE)]
    jobs = [(spec, ctx, size, seed, b) for b, size in enumerate(sizes)]
    if workers == 1 or len(jobs) == 1:
        parts = [_run_block(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _run_block(*job), jobs))
    h = None if parts[0][0] is None else np.concatenate([p[0] for p in parts])
    n_r = np.concatenate([p[1] for p in parts]).astype(np.int64)
    phi_hat = np.concatenate([p[2] for p in parts])
    err = phi_hat - spec.true_phase
    sq = err**2
    rms = math.sqrt(sq.mean())
    stderr = float(sq.std() / (2 * rms * math.sqrt(shots))) if rms > 0 else 0.0
    return MonteCarloResult(spec.n_electrons, rms, float(err.mean()), stderr, spec.true_phase, h, n_r, phi_hat)


def write_shots_csv(result: MonteCarloResult, target) -> None:
    """Write the shot stream with columns ``shot_index,h,n_L,n_R,phi_hat``."""
    own = isinstance(target, (str, os.PathLike))
    fh = open(target, "w", newline="") if own else target
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["shot_index", "h", "n_L", "n_R", "phi_hat"])
        for rec in result.records():
            h = "" if rec.h is None else f"{rec.h:.17g}"
            writer.writerow([rec.shot_index, h, rec.n_l, rec.n_r, f"{rec.phi_hat:.17g}"])
    finally:
        if own:
            fh.close()


def _require_ghz(spec: MZISpec):
    sq = spec.squeezer
    if not isinstance(sq, OATConfig) or abs(sq.chi_int - math.pi) > 1e-12:
        raise DomainError("parity readout is defined for the interaction squeezer at chi = pi")


def parity_fringe(spec: MZISpec, phases) -> np.ndarray:
    """``<(-1)^{n_R}>`` of the final state for each phase in ``phases``.

    The phases may lie anywhere on the circle; ``spec.true_phase`` is ignored.
    """
    _require_ghz(spec)
    if not spec.apply_alignment:
        raise DomainError("parity readout needs the GHZ alignment")
    prepared = _prepare(spec, None)
    n = spec.n_electrons
    phases = np.atleast_1d(np.asarray(phases, dtype=float))
    bs2 = rotation_matrix(n, "x", math.pi / 2)
    states = prepared.amplitudes * np.exp(-1j * phases[:, None] * m_values(n))
    prob = np.abs(states @ bs2.T) ** 2
    sign = (-1.0) ** np.arange(n + 1)
    return prob @ sign


def parity_expectation(spec: MZISpec) -> float:
    """Parity ``sum_k (-1)^k p_k`` of the final state at ``spec.true_phase``."""
    return float(parity_fringe(spec, [spec.true_phase])[0])


def parity_phase_uncertainty(spec: MZISpec, samples: int = 64) -> float:
    """``1/sqrt(F_P)`` with ``F_P = max_phi |dP/dphi|^2 / (1 - P^2)``.

    The maximum is taken over ``samples`` phases spread across one fringe
    period ``2 pi / N``; points where ``1 - P^2`` vanishes are skipped.
    """
    n = spec.n_electrons
    phases = (np.arange(samples) + 0.5) * (2 * math.pi / n) / samples
    p = parity_fringe(spec, phases)
    dp = (parity_fringe(spec, phases + CAL_STEP) - parity_fringe(spec, phases - CAL_STEP)) / (2 * CAL_STEP)
    room = 1.0 - p**2
    ok = room > 1e-8
    if not ok.any():
        raise UninformativeReadoutError("parity signal is saturated at every phase")
    fisher = np.max(dp[ok] ** 2 / room[ok])
    if fisher <= 0:
        raise UninformativeReadoutError("parity signal does not depend on the phase")
    return float(fisher**-0.5)
