"""Spin Wigner function on the Bloch sphere (multipole expansion).

The state is expanded in spherical tensor operators ``T_KQ`` and the
Wigner function is

    W(theta, phi) = sqrt((N+1)/(4 pi)) * sum_{K,Q} rho_KQ Y_KQ(theta, phi),
    rho_KQ = Tr(rho T_KQ^dagger),

normalized so that ``integral W dOmega = 1`` for every state.

The tensor operators are not built from Clebsch-Gordan tables. For a fixed
``Q`` the operators ``{T_KQ}`` are the eigenvectors of the Casimir
superoperator ``X -> sum_a [S_a, [S_a, X]]`` (eigenvalue ``K(K+1)``), which
is a real symmetric tridiagonal matrix on the ``Q``-th diagonal. Solving it
with LAPACK is stable up to the size guard, unlike the Clebsch-Gordan
recursions. Phases follow Condon-Shortley: ``T_KK`` is proportional to
``(-S_+)^K`` and ``[S_-, T_KQ] = sqrt((K+Q)(K-Q+1)) T_K,Q-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import sph_harm_y

from .dicke import DickeState, _require_normalized
from .exceptions import DomainError, UnsupportedSizeError

__all__ = ["SphereGrid", "wigner_function", "multipoles", "tensor_operator", "MAX_WIGNER_N"]

MAX_WIGNER_N = 100


@dataclass(frozen=True)
class SphereGrid:
    """Polar samples ``theta`` in [0, pi] and azimuthal samples ``phi`` in [0, 2 pi)."""

    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        if theta.ndim != 1 or theta.size < 2 or phi.ndim != 1 or phi.size < 4:
            raise DomainError("grid needs at least 2 polar and 4 azimuthal samples")
        if np.any(np.diff(theta) <= 0) or np.any(np.diff(phi) <= 0):
            raise DomainError("grid samples must be strictly increasing")
        if theta[0] < 0 or theta[-1] > np.pi or phi[0] < 0 or phi[-1] >= 2 * np.pi:
            raise DomainError("grid samples out of range")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def uniform(cls, n_theta: int = 61, n_phi: int = 120) -> "SphereGrid":
        return cls(np.linspace(0.0, np.pi, n_theta), 2 * np.pi * np.arange(n_phi) / n_phi)

    @property
    def shape(self):
        return (self.theta.size, self.phi.size)

    def mesh(self):
        return np.meshgrid(self.theta, self.phi, indexing="ij")


def _jm(n):
    j = n / 2
    m = np.arange(n + 1) - j  # ascending m, index i = m + j
    mu = np.sqrt(np.maximum(j * (j + 1) - m * (m + 1), 0.0))  # <i+1|S+|i>
    lam = np.sqrt(np.maximum(j * (j + 1) - m * (m - 1), 0.0))  # <i-1|S-|i>
    return j, m, mu, lam


def _lower(t, q, lam):
    """Entries of ``[S_-, T]`` for ``T`` on diagonal ``q`` (result on ``q - 1``)."""
    n = t.size - 1
    out = np.zeros_like(t)
    i = np.arange(n + 1)
    ok = (i + q >= 0) & (i + q <= n)
    out[ok] += t[ok] * lam[i[ok] + q]
    out[1:] -= lam[1:] * t[:-1]
    return out


@lru_cache(maxsize=8)
def _tensor_table(n: int):
    """All ``T_KQ`` for spin N/2 as an array ``[K, Q + N, i]``.

    Entry ``i`` is ``<m+Q| T_KQ |m>`` with ``m = i - N/2`` (ascending m).
    """
    j, m, mu, lam = _jm(n)
    table = np.zeros((n + 1, 2 * n + 1, n + 1))
    for q in range(-n, n + 1):
        idx = np.arange(max(0, -q), min(n, n - q) + 1)
        mm = m[idx]
        diag = 2 * j * (j + 1) - 2 * mm * (mm + q)
        off = -lam[idx[1:]] * mu[idx[1:] + q - 1]
        _, vecs = eigh_tridiagonal(diag, off)
        # eigenvalues K(K+1) ascend with K = |q|..N
        table[abs(q):, q + n, idx] = vecs.T
    for k in range(n + 1):
        top = table[k, k + n]
        if (-1) ** k * top.sum() < 0:
            table[k, k + n] = -top
        for q in range(k, -k, -1):
            lowered = _lower(table[k, q + n], q, lam)
            if lowered @ table[k, q - 1 + n] < 0:
                table[k, q - 1 + n] *= -1
    table.setflags(write=False)
    return table


def tensor_operator(n: int, k: int, q: int) -> np.ndarray:
    """Dense ``T_KQ`` on the Dicke basis (index ``k = n_R``, descending m)."""
    if not 0 <= k <= n or abs(q) > k:
        raise DomainError(f"invalid multipole (K={k}, Q={q}) for N={n}")
    t = _tensor_table(n)[k, q + n]
    mat = np.zeros((n + 1, n + 1))
    i = np.arange(n + 1)
    ok = (i + q >= 0) & (i + q <= n)
    mat[i[ok] + q, i[ok]] = t[ok]
    # ascending-m index i corresponds to Dicke index N - i
    return mat[::-1, ::-1]


def multipoles(state: DickeState) -> np.ndarray:
    """State multipoles ``rho_KQ`` as an array ``[K, Q + N]``."""
    n = state.n_electrons
    if n > MAX_WIGNER_N:
        raise UnsupportedSizeError(f"Wigner function supports N <= {MAX_WIGNER_N}, got {n}")
    _require_normalized(state)
    psi = state.amplitudes[::-1]  # ascending m
    table = _tensor_table(n)
    rho = np.zeros((n + 1, 2 * n + 1), dtype=complex)
    for q in range(-n, n + 1):
        lo, hi = max(0, -q), min(n, n - q)
        # rho_{i+q, i} = psi[i+q] conj(psi[i])
        coherences = psi[lo + q : hi + q + 1] * psi[lo : hi + 1].conj()
        rho[:, q + n] = table[:, q + n, lo : hi + 1] @ coherences
    return rho


def wigner_function(state: DickeState, grid: SphereGrid) -> np.ndarray:
    """Wigner function sampled on ``grid``; shape ``(n_theta, n_phi)``."""
    n = state.n_electrons
    rho = multipoles(state)
    theta, phi = grid.theta, grid.phi
    ks = np.arange(n + 1)
    field = np.zeros((theta.size, phi.size), dtype=complex)
    for q in range(-n, n + 1):
        kk = ks[abs(q):]
        # Y_KQ(theta, 0) is real; the azimuthal factor is exp(i q phi)
        legendre = sph_harm_y(kk[:, None], q, theta[None, :], 0.0).real
        polar = rho[abs(q):, q + n] @ legendre
        field += polar[:, None] * np.exp(1j * q * phi)[None, :]
    field *= np.sqrt((n + 1) / (4 * np.pi))
    residue = np.abs(field.imag).max()
    if residue > 1e-9 * max(1.0, np.abs(field.real).max()):
        raise ArithmeticError(f"Wigner function has imaginary residue {residue:.3g}")
    return field.real
