"""State preparation: one-axis twisting and Gaussian QND measurement.

One-axis twisting (capacitive channels) multiplies each Dicke amplitude by
``exp(-i chi m^2 / 2)``. The measurement squeezer applies the Gaussian Kraus
operator

    K(h) = (chi/pi)^(1/4) exp(-chi (n_R - h)^2 / 2),

normalized so that ``integral K(h)^dagger K(h) dh = 1``; ``h`` is a real
detector reading in units of electrons and ``chi = 1/(2 sigma^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dicke import DickeState, _moment_arrays, _require_normalized, m_values, polar_state
from .exceptions import DegenerateOutcomeError, DomainError

__all__ = [
    "OATConfig",
    "MeasConfig",
    "MeasOutcome",
    "oat_apply",
    "oat_tilt_delta",
    "oat_alignment_angle",
    "squeezed_direction",
    "kraus_apply",
    "kraus_weights",
    "outcome_density",
    "sample_outcome",
    "h_quadrature",
    "ghz_axis",
    "ghz_fidelity",
]

MIN_DENSITY = 1e-300


@dataclass(frozen=True)
class OATConfig:
    """Interaction-based squeezer with twisting strength ``chi_int``."""

    chi_int: float

    def __post_init__(self):
        if not np.isfinite(self.chi_int) or self.chi_int < 0:
            raise DomainError(f"chi_int must be finite and >= 0, got {self.chi_int!r}")

    kind = "interaction"

    @property
    def chi(self) -> float:
        return self.chi_int


@dataclass(frozen=True)
class MeasConfig:
    """Measurement-based squeezer. ``chi_meas = 0`` means no measurement."""

    chi_meas: float

    def __post_init__(self):
        if not np.isfinite(self.chi_meas) or self.chi_meas < 0:
            raise DomainError(f"chi_meas must be finite and >= 0, got {self.chi_meas!r}")

    kind = "measurement"

    @classmethod
    def from_sigma(cls, sigma: float) -> "MeasConfig":
        if math.isinf(sigma):
            return cls(0.0)
        if sigma <= 0:
            raise DomainError(f"sigma must be positive, got {sigma!r}")
        return cls(1.0 / (2.0 * sigma**2))

    @property
    def chi(self) -> float:
        return self.chi_meas

    @property
    def sigma(self) -> float:
        """Detector noise in electrons; infinite when ``chi_meas == 0``."""
        if self.chi_meas == 0:
            return math.inf
        return 1.0 / math.sqrt(2.0 * self.chi_meas)


@dataclass(frozen=True)
class MeasOutcome:
    h: float
    density: float
    post_state: DickeState


def oat_apply(state: DickeState, cfg: OATConfig) -> DickeState:
    """One-axis twisting ``exp(-i chi_int S_z^2 / 2)``."""
    m = m_values(state.n_electrons)
    return DickeState(state.n_electrons, state.amplitudes * np.exp(-0.5j * cfg.chi_int * m * m))


def oat_tilt_delta(n: int, chi: float) -> float:
    """Closed-form tilt of the OAT squeezing ellipse.

    Starting from the ``+x`` coherent state, the minimal transverse variance
    of the twisted state lies along ``(0, -sin delta, cos delta)``: ``delta``
    is measured from ``+z`` towards ``-y``. The ``arctan`` branch is chosen
    so that ``delta`` lies in ``[0, pi/2]``; ``chi -> 0`` gives ``pi/4``.
    """
    if n < 2:
        raise DomainError(f"tilt angle needs N >= 2, got {n}")
    if not np.isfinite(chi) or chi < 0:
        raise DomainError(f"chi must be finite and >= 0, got {chi!r}")
    if chi == 0:
        return math.pi / 4
    num = 4.0 * math.sin(chi / 2) * math.cos(chi / 2) ** (n - 2)
    den = 1.0 - math.cos(chi) ** (n - 2)
    angle = math.atan2(num, den)
    if angle < 0:
        angle += math.pi
    return 0.5 * angle


def squeezed_direction(delta: float) -> np.ndarray:
    """Unit vector at angle ``delta`` from ``+z`` towards ``-y``."""
    return np.array([0.0, -math.sin(delta), math.cos(delta)])


def oat_alignment_angle(twisted: DickeState, chi: float) -> float:
    """Rotation angle about ``x`` that moves the squeezed axis onto ``y``.

    Uses the closed-form tilt, swapping to the orthogonal branch if the
    state's covariance shows the other one is the narrow axis.
    """
    delta = oat_tilt_delta(twisted.n_electrons, chi)
    _, cov = _moment_arrays(twisted.amplitudes)
    d0 = squeezed_direction(delta)
    d1 = squeezed_direction(delta + math.pi / 2)
    if d1 @ cov @ d1 < d0 @ cov @ d0:
        delta += math.pi / 2
    return math.pi / 2 - delta


def kraus_weights(n: int, cfg: MeasConfig, h) -> np.ndarray:
    """Diagonal of ``K(h)`` over ``n_R = 0..N``; shape ``h.shape + (N+1,)``."""
    if cfg.chi_meas <= 0:
        raise DomainError("Kraus operator requires chi_meas > 0")
    h = np.asarray(h, dtype=float)
    k = np.arange(n + 1)
    chi = cfg.chi_meas
    return (chi / math.pi) ** 0.25 * np.exp(-0.5 * chi * (k - h[..., None]) ** 2)


def kraus_apply(state: DickeState, cfg: MeasConfig, h: float) -> MeasOutcome:
    """Condition ``state`` on detector reading ``h``."""
    _require_normalized(state)
    if not np.isfinite(h):
        raise DomainError(f"measurement result must be finite, got {h!r}")
    b = kraus_weights(state.n_electrons, cfg, h) * state.amplitudes
    density = float(np.sum(np.abs(b) ** 2))
    if density < MIN_DENSITY:
        raise DegenerateOutcomeError(f"outcome h={h} has vanishing density {density:.3g}")
    return MeasOutcome(float(h), density, DickeState(state.n_electrons, b / math.sqrt(density)))


def outcome_density(state: DickeState, cfg: MeasConfig, h):
    """``p(h) = sqrt(chi/pi) sum_k |a_k|^2 exp(-chi (k-h)^2)``; vectorized in ``h``."""
    if cfg.chi_meas <= 0:
        raise DomainError("outcome density requires chi_meas > 0")
    prob = np.abs(state.amplitudes) ** 2
    h_arr = np.asarray(h, dtype=float)
    k = np.arange(state.n_electrons + 1)
    chi = cfg.chi_meas
    dens = math.sqrt(chi / math.pi) * (np.exp(-chi * (k - h_arr[..., None]) ** 2) @ prob)
    return float(dens) if dens.ndim == 0 else dens


def _sample_h(state: DickeState, cfg: MeasConfig, rng: np.random.Generator, size=None):
    prob = np.abs(state.amplitudes) ** 2
    prob = prob / prob.sum()
    counts = rng.choice(state.n_electrons + 1, size=size, p=prob)
    return counts + cfg.sigma * rng.standard_normal(size)


def sample_outcome(state: DickeState, cfg: MeasConfig, rng: np.random.Generator) -> MeasOutcome:
    """Draw ``h ~ p(h)`` exactly and return the conditioned state.

    Two stages: the electron count from the number distribution, then
    Gaussian detector noise of width ``sigma`` around it.
    """
    _require_normalized(state)
    if cfg.chi_meas <= 0:
        raise DomainError("sampling requires chi_meas > 0")
    h = float(_sample_h(state, cfg, rng))
    return kraus_apply(state, cfg, h)


def h_quadrature(state_or_n, cfg: MeasConfig, resolution: int = 8):
    """Trapezoid nodes and weights over ``[-6 sigma, N + 6 sigma]``.

    The spacing is at most ``min(sigma, 1)/resolution``, which resolves both
    the detector Gaussian and the unit spacing between count peaks.
    """
    if cfg.chi_meas <= 0:
        raise DomainError("quadrature requires chi_meas > 0")
    n = state_or_n.n_electrons if isinstance(state_or_n, DickeState) else int(state_or_n)
    sigma = cfg.sigma
    lo, hi = -6.0 * sigma, n + 6.0 * sigma
    if resolution < 1:
        raise DomainError(f"resolution must be >= 1, got {resolution!r}")
    target = min(sigma, 1.0) / resolution
    intervals = int(math.ceil((hi - lo) / target))
    nodes = np.linspace(lo, hi, intervals + 1)
    weights = np.full(nodes.size, (hi - lo) / intervals)
    weights[[0, -1]] *= 0.5
    return nodes, weights


def ghz_axis(state: DickeState) -> np.ndarray:
    """Principal axis of the spin covariance, preferring the one closest to ``z``.

    For the fully twisted state (``chi = pi``) this is the axis of the GHZ
    superposition: ``x`` for even N, ``y`` for odd N starting from ``+x``.
    """
    _require_normalized(state)
    _, cov = _moment_arrays(state.amplitudes)
    w, v = np.linalg.eigh(cov)
    top = v[:, np.abs(w - w[-1]) <= 1e-9 * max(1.0, abs(w[-1]))]
    proj = top @ (top.T @ np.array([0.0, 0.0, 1.0]))
    axis = proj if np.linalg.norm(proj) > 1e-9 else top[:, -1]
    return axis / np.linalg.norm(axis)


def ghz_fidelity(state: DickeState, axis=None) -> float:
    """``max_theta |<GHZ_theta|psi>|^2`` for GHZ states along ``axis``.

    ``GHZ_theta = (|+n> + e^{i theta}|-n>)/sqrt(2)``; maximizing over the
    relative phase gives ``(|<+n|psi>| + |<-n|psi>|)^2 / 2``.
    """
    if axis is None:
        axis = ghz_axis(state)
    axis = np.asarray(axis, dtype=float)
    up = polar_state(state.n_electrons, axis)
    down = polar_state(state.n_electrons, -axis)
    a = abs(np.vdot(up.amplitudes, state.amplitudes))
    b = abs(np.vdot(down.amplitudes, state.amplitudes))
    return 0.5 * (a + b) ** 2
