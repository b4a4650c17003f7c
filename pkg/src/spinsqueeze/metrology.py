"""Phase-uncertainty figures of merit and squeezing-strength optimization.

Two families of metrics are computed for every squeezed batch:

* the Wineland parameter ``xi2 = N * dphi_W**2`` with
  ``dphi_W = sqrt(min transverse variance) / |<S>|``, the uncertainty reached
  by reading out ``S_z`` and inverting the fringe, and
* the pure-state quantum Fisher information ``F = 4 * lambda_max(cov)``
  with ``dphi_F = F**-0.5``, the Cramer-Rao bound.

For the measurement squeezer both are averaged over the detector reading
``h``. The post-measurement state keeps its mean spin along ``x`` but is
displaced in ``z`` by the reading; the phase is read against that known
offset, so ``xi2(h)`` takes the narrow axis in the ``y``-``z`` plane and
divides by ``<S_x>**2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .dicke import DickeState, _moment_arrays, _require_normalized, axis_vector, coherent_state
from .exceptions import (
    DomainError,
    MeanSpinDegenerateError,
    NumericalIntegrationError,
    OptimizerBracketError,
)
from .squeezers import MIN_DENSITY, MeasConfig, OATConfig, h_quadrature, kraus_weights, oat_apply

__all__ = [
    "MetricsRow",
    "OptimumReport",
    "WinelandResult",
    "ScalingFit",
    "sql",
    "heisenberg",
    "wineland_metrics",
    "qfi",
    "none_metrics",
    "oat_metrics",
    "meas_metrics",
    "analytic_meas_fisher",
    "golden_section_min",
    "optimize_chi",
    "scaling_fit",
    "CHI_BRACKETS",
]

CHI_BRACKETS = {"interaction": (1e-4, math.pi), "measurement": (1e-3, 20.0)}
NORMALIZATION_TOL = 1e-6
_CHUNK_ELEMENTS = 2_000_000


@dataclass(frozen=True)
class MetricsRow:
    n_electrons: int
    chi: float
    squeezer_kind: str
    delta_phi_w: float
    delta_phi_f: float
    xi2: float
    fisher: float
    sql: float
    heisenberg: float
    # (integral p F dh)**-0.5; differs from delta_phi_f only for the measurement squeezer
    delta_phi_f_mean_fisher: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "n_electrons", int(self.n_electrons))
        for name in ("chi", "delta_phi_w", "delta_phi_f", "xi2", "fisher", "sql", "heisenberg"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.delta_phi_f_mean_fisher is not None:
            object.__setattr__(self, "delta_phi_f_mean_fisher", float(self.delta_phi_f_mean_fisher))

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class OptimumReport:
    n_electrons: int
    kind: str
    chi_opt: float
    delta_phi_w_min: float
    evaluations: int
    bracket: tuple

    def __post_init__(self):
        object.__setattr__(self, "chi_opt", float(self.chi_opt))
        object.__setattr__(self, "delta_phi_w_min", float(self.delta_phi_w_min))


class WinelandResult(NamedTuple):
    xi2: float
    delta_phi_w: float
    angle: float


class ScalingFit(NamedTuple):
    slope: float
    intercept: float
    residual: float
    n_values: tuple
    metric_values: tuple


def sql(n) -> float:
    """Standard quantum limit ``N**-0.5``."""
    if n < 1:
        raise DomainError(f"N must be >= 1, got {n!r}")
    return float(n) ** -0.5


def heisenberg(n) -> float:
    """Heisenberg limit ``1/N``."""
    if n < 1:
        raise DomainError(f"N must be >= 1, got {n!r}")
    return 1.0 / float(n)


def _transverse_frame(ref: np.ndarray):
    """Orthonormal ``(e1, e2)`` perpendicular to ``ref``.

    ``e1`` is the part of ``z`` orthogonal to ``ref`` (``x`` when ``ref`` is
    polar) and ``e2 = ref x e1``. For ``ref = x`` this is ``(z, -y)``, the
    frame in which the OAT tilt angle is measured.
    """
    z = np.array([0.0, 0.0, 1.0])
    e1 = z - (z @ ref) * ref
    if np.linalg.norm(e1) < 1e-8:
        e1 = np.array([1.0, 0.0, 0.0]) - ref[0] * ref
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(ref, e1)


def wineland_metrics(state: DickeState, axis=None) -> WinelandResult:
    """Wineland squeezing parameter and the corresponding phase uncertainty.

    Parameters
    ----------
    state : DickeState
        Normalized input.
    axis : optional
        Reference direction of the readout. By default the state's own mean
        spin direction is used. With ``axis="x"`` the denominator is
        ``<S_x>**2`` and the narrow axis is sought in the ``y``-``z`` plane,
        which is how the offset measurement-squeezed states are read out.

    Returns
    -------
    WinelandResult
        ``xi2``, ``delta_phi_w`` and ``angle``, the direction of minimal
        variance in the transverse frame (from ``e1`` towards ``e2``, see
        ``_transverse_frame``), reduced to ``[0, pi)``.
    """
    _require_normalized(state)
    n = state.n_electrons
    mean, cov = _moment_arrays(state.amplitudes)
    if axis is None:
        length = np.linalg.norm(mean)
        if length <= 1e-9 * n:
            raise MeanSpinDegenerateError("mean spin vanishes; use qfi() for this state")
        ref = mean / length
    else:
        ref = axis_vector(axis)
        length = abs(mean @ ref)
        if length <= 1e-9 * n:
            raise MeanSpinDegenerateError(f"mean spin along {axis!r} vanishes")
    e1, e2 = _transverse_frame(ref)
    frame = np.stack([e1, e2])
    w, v = np.linalg.eigh(frame @ cov @ frame.T)
    var_min = max(w[0], 0.0)
    dphi = math.sqrt(var_min) / length
    angle = math.atan2(v[1, 0], v[0, 0]) % math.pi
    return WinelandResult(n * dphi**2, dphi, angle)


def qfi(state: DickeState) -> float:
    """Quantum Fisher information maximized over rotation generators."""
    _require_normalized(state)
    _, cov = _moment_arrays(state.amplitudes)
    return 4.0 * float(np.linalg.eigvalsh(cov)[-1])


def none_metrics(n: int, chi: float = 0.0) -> MetricsRow:
    """Unsqueezed baseline: both uncertainties equal the SQL."""
    s = sql(n)
    return MetricsRow(n, chi, "none", s, s, 1.0, float(n), s, heisenberg(n), s)


def oat_metrics(n: int, chi_int: float) -> MetricsRow:
    """Metrics of the one-axis-twisted coherent state."""
    if n < 2:
        raise DomainError(f"OAT metrics need N >= 2, got {n}")
    state = oat_apply(coherent_state(n), OATConfig(chi_int))
    fisher = qfi(state)
    dphi_f = fisher**-0.5
    try:
        wl = wineland_metrics(state)
        dphi_w, xi2 = wl.delta_phi_w, wl.xi2
    except MeanSpinDegenerateError:
        dphi_w, xi2 = math.inf, math.inf
    return MetricsRow(n, chi_int, "interaction", dphi_w, dphi_f, xi2, fisher, sql(n), heisenberg(n), dphi_f)


def _meas_integrands(amps: np.ndarray, n: int, cfg: MeasConfig, nodes: np.ndarray):
    """``p(h)``, ``xi2(h)`` and ``F(h)`` on a block of quadrature nodes."""
    b = kraus_weights(n, cfg, nodes) * amps
    p = np.sum(np.abs(b) ** 2, axis=-1)
    ok = p >= MIN_DENSITY
    xi2 = np.zeros_like(p)
    fisher = np.zeros_like(p)
    if not ok.any():
        return p, xi2, fisher, ok
    post = b[ok] / np.sqrt(p[ok])[:, None]
    mean, cov = _moment_arrays(post)
    a, c, off = cov[:, 1, 1], cov[:, 2, 2], cov[:, 1, 2]
    var_min = np.maximum(0.5 * (a + c) - np.sqrt(0.25 * (a - c) ** 2 + off**2), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi2[ok] = n * var_min / mean[:, 0] ** 2
    fisher[ok] = 4.0 * np.linalg.eigvalsh(cov)[:, -1]
    return p, xi2, fisher, ok


def meas_metrics(n: int, chi_meas: float) -> MetricsRow:
    """Metrics of the measurement squeezer averaged over the reading ``h``.

    ``delta_phi_w = sqrt(integral p xi2 dh / N)`` and
    ``delta_phi_f = integral p F**-0.5 dh``; ``fisher`` holds the mean Fisher
    information ``integral p F dh`` and ``delta_phi_f_mean_fisher`` its
    inverse square root.
    """
    if n < 2:
        raise DomainError(f"measurement metrics need N >= 2, got {n}")
    cfg = MeasConfig(chi_meas)
    if chi_meas == 0:
        row = none_metrics(n, 0.0)
        return MetricsRow(**{**row.as_dict(), "squeezer_kind": "measurement"})
    amps = coherent_state(n).amplitudes
    nodes, weights = h_quadrature(n, cfg)
    chunk = max(1, _CHUNK_ELEMENTS // (n + 1))
    norm = w_xi2 = w_f = w_f_inv = 0.0
    for start in range(0, nodes.size, chunk):
        sl = slice(start, start + chunk)
        p, xi2, fisher, ok = _meas_integrands(amps, n, cfg, nodes[sl])
        wp = weights[sl] * p
        norm += wp.sum()
        wp = wp[ok]
        w_xi2 += wp @ xi2[ok]
        w_f += wp @ fisher[ok]
        w_f_inv += wp @ fisher[ok] ** -0.5
    if abs(norm - 1.0) > NORMALIZATION_TOL or not np.isfinite(w_xi2):
        raise NumericalIntegrationError(f"outcome density integrates to {norm:.12g}")
    dphi_w = math.sqrt(w_xi2 / n)
    return MetricsRow(
        n, chi_meas, "measurement", dphi_w, w_f_inv, w_xi2, w_f, sql(n), heisenberg(n), w_f**-0.5
    )


def analytic_meas_fisher(n: int, chi_meas: float):
    """Closed-form mean Fisher information of the measurement squeezer.

    Returns ``(F_eff, F_eff**-0.5)`` with
    ``F_eff = N + (N**2 - N)/2 * (1 - exp(-chi_meas))``.
    """
    if n < 1:
        raise DomainError(f"N must be >= 1, got {n!r}")
    if chi_meas < 0:
        raise DomainError(f"chi_meas must be >= 0, got {chi_meas!r}")
    f_eff = n + 0.5 * (n * n - n) * (-math.expm1(-chi_meas))
    return f_eff, f_eff**-0.5


INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(f, a: float, b: float, tol: float = 1e-4):
    """Golden-section search for the minimum of ``f`` on ``[a, b]``.

    Returns ``(x, f(x), evaluations)`` for the best probed point, endpoints
    included. Raises ``OptimizerBracketError`` when both endpoints lie below
    the first interior probes, i.e. the bracket does not hold a minimum.
    """
    if not a < b:
        raise DomainError(f"empty bracket [{a}, {b}]")
    fa, fb = f(a), f(b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    evaluations = 4
    if min(fc, fd) > max(fa, fb):
        raise OptimizerBracketError("objective is not unimodal on the bracket")
    best = min([(fa, a), (fb, b), (fc, c), (fd, d)])
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            best = min(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            best = min(best, (fd, d))
        evaluations += 1
    return best[1], best[0], evaluations


def _objective(n: int, kind: str):
    if kind == "interaction":
        return lambda chi: oat_metrics(n, chi).delta_phi_w
    if kind == "measurement":
        return lambda chi: meas_metrics(n, chi).delta_phi_w
    raise DomainError(f"cannot optimize squeezer kind {kind!r}")


def optimize_chi(n: int, kind: str, bracket=None, rtol: float = 1e-4) -> OptimumReport:
    """Squeezing strength minimizing ``delta_phi_w``.

    Golden-section search on ``log(chi)``, so ``rtol`` is a relative
    tolerance on ``chi``. Default brackets are ``[1e-4, pi]`` for the
    interaction squeezer and ``[1e-3, 20]`` for the measurement squeezer.
    """
    if n < 2:
        raise DomainError(f"optimization needs N >= 2, got {n}")
    lo, hi = bracket if bracket is not None else CHI_BRACKETS.get(kind, (None, None))
    if lo is None:
        raise DomainError(f"cannot optimize squeezer kind {kind!r}")
    objective = _objective(n, kind)
    log_chi, value, evals = golden_section_min(
        lambda t: objective(math.exp(t)), math.log(lo), math.log(hi), rtol
    )
    return OptimumReport(n, kind, math.exp(log_chi), value, evals, (lo, hi))


_METRICS = ("xi2", "delta_phi_w", "delta_phi_f", "fisher")


def scaling_fit(kind: str, n_list: Sequence[int], metric: str = "xi2", chi: Optional[float] = None) -> ScalingFit:
    """Log-log slope of ``metric`` versus ``N``.

    By default each point is evaluated at the optimal squeezing strength for
    its ``N``; pass ``chi`` to evaluate a fixed-strength series instead.
    ``kind="none"`` fits the unsqueezed baseline.
    """
    ns = sorted(set(int(v) for v in n_list))
    if len(ns) < 4:
        raise DomainError("scaling fit needs at least 4 distinct N values")
    if ns[-1] < 10 * ns[0]:
        raise DomainError("N values must span at least one decade")
    if metric not in _METRICS:
        raise DomainError(f"unknown metric {metric!r}; choose from {_METRICS}")
    rows = []
    for n in ns:
        if kind == "none":
            rows.append(none_metrics(n))
            continue
        strength = chi if chi is not None else optimize_chi(n, kind).chi_opt
        rows.append(oat_metrics(n, strength) if kind == "interaction" else meas_metrics(n, strength))
    values = np.array([getattr(r, metric) for r in rows])
    x, y = np.log(ns), np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return ScalingFit(float(slope), float(intercept), residual, tuple(ns), tuple(values.tolist()))
