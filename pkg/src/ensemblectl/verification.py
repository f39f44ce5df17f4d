"""Numeric certification of ensemble pairs and finite-subensemble steering."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag, expm
from scipy.optimize import linear_sum_assignment

from .linalg import RANK_TOL, kalman_matrix, kalman_rank
from .synthesis import EnsemblePair

__all__ = [
    "kalman_rank",
    "kalman_matrix",
    "SpectrumMismatch",
    "SingularGramianError",
    "CertificationReport",
    "SteeringResult",
    "analytic_spectrum",
    "eigenvalues_at",
    "match_spectra",
    "certify",
    "steer_subensemble",
    "simulate",
    "eigen_trajectories",
]

SPECTRUM_TOL = 1e-8
GAP_TOL = 1e-6
GRAMIAN_RCOND = 1e-14
MAX_STACKED_STATES = 64


class SpectrumMismatch(AssertionError):
    """Numeric eigenvalues disagree with the closed-form block spectrum."""


class SingularGramianError(RuntimeError):
    """The stacked controllability Gramian is (numerically) singular."""


def analytic_spectrum(pair: EnsemblePair, sigma: float) -> np.ndarray:
    """Union over blocks of ``r_i(sigma) * exp(2 pi i k / n_i)``."""
    radii = pair.radii(sigma)
    out = []
    for r, size in zip(radii, pair.cycle_sizes):
        out.append(r * np.exp(2j * np.pi * np.arange(size) / size))
    return np.concatenate(out) if out else np.zeros(0, dtype=complex)


def match_spectra(a: np.ndarray, b: np.ndarray) -> float:
    """Largest distance under the best one-to-one pairing of two spectra."""
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def eigenvalues_at(pair: EnsemblePair, sigma: float, checked: bool = False) -> np.ndarray:
    """Closed-form spectrum of ``A(sigma)``; ``checked`` compares with ``numpy.linalg.eigvals``."""
    lam = analytic_spectrum(pair, sigma)
    if checked:
        numeric = np.linalg.eigvals(pair.A(sigma))
        err = match_spectra(lam, numeric)
        if err > SPECTRUM_TOL:
            raise SpectrumMismatch(f"spectrum mismatch {err:.3e} at sigma={sigma}")
    return lam


def _min_pairwise_gap(values: np.ndarray) -> float:
    if values.size < 2:
        return np.inf
    d = np.abs(values[:, None] - values[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


@dataclass
class CertificationReport:
    sigma_grid: np.ndarray
    min_rank_margin: float
    min_eigen_gap_within: float
    min_eigen_gap_across: float
    max_spectrum_error: float
    verdict: bool
    failures: list = field(default_factory=list)

    @property
    def failed_items(self) -> set:
        return {f["item"] for f in self.failures}

    def to_dict(self) -> dict:
        def num(x):
            return None if not np.isfinite(x) else float(x)

        return {
            "grid_size": int(self.sigma_grid.size),
            "min_rank_margin": num(self.min_rank_margin),
            "min_eigen_gap_within": num(self.min_eigen_gap_within),
            "min_eigen_gap_across": num(self.min_eigen_gap_across),
            "max_spectrum_error": num(self.max_spectrum_error),
            "verdict": self.verdict,
            "failures": self.failures,
        }


def certify(pair: EnsemblePair, grid_size: int = 101) -> CertificationReport:
    """Check the three sufficient conditions for uniform ensemble controllability.

    1. ``(A(sigma), b)`` controllable for every sigma: Kalman margin on the grid.
    2. ``A(sigma)`` has simple eigenvalues: every block has the positive real
       eigenvalue ``r_i(sigma)``, so radii must be positive and distinct;
       corroborated by numeric eigenvalue gaps on the grid.
    3. Spectra at different sigma never meet: radii strictly increasing in
       sigma and the radius intervals ``[r_i(0), r_i(1)]`` pairwise disjoint;
       corroborated by the smallest distance between numeric spectra at
       distinct grid points.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    grid = np.linspace(0.0, 1.0, grid_size)
    n = pair.n
    failures = []
    r0 = pair.r0
    rho = pair.rho(grid)

    margins = []
    spectra = []
    spec_err = 0.0
    within = np.inf
    for s in grid:
        A = pair.A(s)
        rank, margin = kalman_rank(A, pair.b0)
        margins.append(margin if rank == n else 0.0)
        numeric = np.linalg.eigvals(A) if n else np.zeros(0, dtype=complex)
        spec_err = max(spec_err, match_spectra(analytic_spectrum(pair, s), numeric))
        within = min(within, _min_pairwise_gap(numeric))
        spectra.append(numeric)
    min_margin = float(min(margins)) if n else 1.0

    if n and min_margin <= RANK_TOL:
        k = int(np.argmin(margins))
        failures.append({"item": 1, "reason": "Kalman matrix rank deficient", "sigma": float(grid[k]),
                         "margin": float(margins[k])})
    if np.any(rho <= 0):
        failures.append({"item": 1, "reason": "rho vanishes on [0, 1]", "kappa": pair.kappa})

    if np.any(r0 <= 0):
        failures.append({"item": 2, "reason": "zero block radius", "radii": r0.tolist()})
    elif r0.size and _min_pairwise_gap(r0) <= GAP_TOL * max(1.0, float(r0.max())):
        i, j = _closest_pair(r0)
        failures.append({"item": 2, "reason": "equal block radii", "blocks": [i, j],
                         "radii": [float(r0[i]), float(r0[j])]})
    elif within <= GAP_TOL:
        failures.append({"item": 2, "reason": "numerically repeated eigenvalue", "gap": within})

    across = _cross_gap(grid, spectra)
    r_lo = r0 * min(1.0, pair.rho(1.0))
    r_hi = r0 * max(1.0, pair.rho(1.0))
    if pair.kappa <= 0:
        failures.append({"item": 3, "reason": "radii not strictly increasing in sigma",
                         "kappa": pair.kappa})
    else:
        order = np.argsort(r_lo)
        for a, b in zip(order, order[1:]):
            if r_hi[a] >= r_lo[b]:
                failures.append({"item": 3, "reason": "radius intervals overlap",
                                 "blocks": [int(a), int(b)],
                                 "intervals": [[float(r_lo[a]), float(r_hi[a])],
                                               [float(r_lo[b]), float(r_hi[b])]]})
                break
        else:
            if across <= GAP_TOL:
                failures.append({"item": 3, "reason": "numeric spectra meet on the grid",
                                 "gap": across})
    if spec_err > SPECTRUM_TOL:
        failures.append({"item": 2, "reason": "closed-form spectrum disagrees with eigensolver",
                         "error": spec_err})

    return CertificationReport(
        sigma_grid=grid,
        min_rank_margin=min_margin,
        min_eigen_gap_within=within,
        min_eigen_gap_across=across,
        max_spectrum_error=spec_err,
        verdict=not failures,
        failures=failures,
    )


def _closest_pair(values: np.ndarray) -> tuple[int, int]:
    d = np.abs(values[:, None] - values[None, :])
    d[np.diag_indices_from(d)] = np.inf
    i, j = np.unravel_index(np.argmin(d), d.shape)
    return int(min(i, j)), int(max(i, j))


def _cross_gap(grid: np.ndarray, spectra: list) -> float:
    if not spectra or spectra[0].size == 0:
        return np.inf
    lam = np.stack(spectra)  # (grid, n)
    flat = lam.reshape(-1)
    owner = np.repeat(np.arange(len(grid)), lam.shape[1])
    d = np.abs(flat[:, None] - flat[None, :])
    d[owner[:, None] == owner[None, :]] = np.inf
    return float(d.min())


def eigen_trajectories(pair: EnsemblePair, grid_size: int = 101) -> list:
    """Rows ``(sigma, block, k, re, im)`` of the closed-form spectrum over a grid."""
    rows = []
    for s in np.linspace(0.0, 1.0, grid_size):
        lam = analytic_spectrum(pair, s)
        idx = 0
        for b, size in enumerate(pair.cycle_sizes):
            for k in range(size):
                rows.append((float(s), b, k, float(lam[idx].real), float(lam[idx].imag)))
                idx += 1
    return rows


# -- steering -----------------------------------------------------------------


@dataclass
class SteeringResult:
    sigmas: np.ndarray
    T: float
    steps: int
    times: np.ndarray
    control_samples: np.ndarray
    terminal_error: float
    control_energy: float
    gramian_rcond: float
    costate: np.ndarray = field(repr=False)
    A_stack: np.ndarray = field(repr=False)
    b_stack: np.ndarray = field(repr=False)

    def control(self, t) -> np.ndarray:
        """Minimum-energy control ``b^T exp(A^T (T - t)) lambda`` at any time(s)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty(t.shape)
        for k, tk in enumerate(t):
            out[k] = self.b_stack @ (expm(self.A_stack.T * (self.T - tk)) @ self.costate)
        return out

    def to_dict(self) -> dict:
        return {
            "sigmas": self.sigmas.tolist(),
            "T": self.T,
            "steps": self.steps,
            "terminal_error": self.terminal_error,
            "control_energy": self.control_energy,
            "gramian_rcond": self.gramian_rcond,
            "times": self.times.tolist(),
            "control": self.control_samples.tolist(),
        }


def _simpson_weights(steps: int, h: float) -> np.ndarray:
    # composite Simpson with one midpoint per step: nodes t_0, t_0+h/2, t_1, ...
    w = np.zeros(2 * steps + 1)
    w[0:-1:2] += h / 6
    w[2::2] += h / 6
    w[1::2] += 4 * h / 6
    return w


def simulate(pair: EnsemblePair, sigmas, x0, control, T: float, steps: int) -> np.ndarray:
    """Classical RK4 for every ``x' = A(sigma) x + b0 u(t)``; returns ``x(T)`` per sigma.

    ``control`` is either a callable of time or an array of samples on the
    half-step grid ``k * T / (2 * steps)``.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    h = T / steps
    if callable(control):
        u = np.asarray(control(np.linspace(0.0, T, 2 * steps + 1)), dtype=float)
    else:
        u = np.asarray(control, dtype=float)
        if u.shape != (2 * steps + 1,):
            raise ValueError("control samples must live on the half-step grid")
    b = pair.b0
    out = []
    for s, x in zip(sigmas, np.asarray(x0, dtype=float)):
        A = pair.A(s)
        x = x.copy()
        for k in range(steps):
            u0, um, u1 = u[2 * k], u[2 * k + 1], u[2 * k + 2]
            k1 = A @ x + b * u0
            k2 = A @ (x + 0.5 * h * k1) + b * um
            k3 = A @ (x + 0.5 * h * k2) + b * um
            k4 = A @ (x + h * k3) + b * u1
            x = x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(x)
    return np.array(out)


def steer_subensemble(
    pair: EnsemblePair,
    sigmas,
    x0,
    xhat,
    T: float = 1.0,
    steps: int = 1000,
    rcond: float = GRAMIAN_RCOND,
) -> SteeringResult:
    """Minimum-energy steering of the finite subensemble at ``sigmas``.

    The stacked Gramian ``int_0^T e^{A s} b b^T e^{A^T s} ds`` is built by
    composite Simpson quadrature in factored form ``W = L L^T``; the costate
    solves ``W lambda = xhat - e^{AT} x0`` through the SVD of ``L``.  The
    terminal error comes from an RK4 re-integration of the resulting control.
    Raises :class:`SingularGramianError` when ``s_min(W) / s_max(W) < rcond``.
    """
    sigmas = np.asarray(sigmas, dtype=float).reshape(-1)
    n = pair.n
    M = sigmas.size
    x0 = np.asarray(x0, dtype=float).reshape(M, n)
    xhat = np.asarray(xhat, dtype=float).reshape(M, n)
    if M == 0:
        raise ValueError("need at least one sigma")
    if np.any((sigmas < 0) | (sigmas > 1)):
        raise ValueError("sigmas must lie in [0, 1]")
    if M * n > MAX_STACKED_STATES:
        raise ValueError(f"stacked system too large ({M * n} > {MAX_STACKED_STATES} states)")
    if steps < 1:
        raise ValueError("steps must be positive")

    A_stack = block_diag(*[pair.A(s) for s in sigmas])
    b_stack = np.tile(pair.b0, M)
    h = T / steps
    times = np.linspace(0.0, T, 2 * steps + 1)
    weights = _simpson_weights(steps, h)

    # g(t) = e^{A (T - t)} b, marched backwards from t = T in half steps
    half = expm(A_stack * (h / 2))
    g = np.empty((times.size, M * n))
    v = b_stack.copy()
    for k in range(times.size - 1, -1, -1):
        g[k] = v
        v = half @ v
    L = (g * np.sqrt(weights)[:, None]).T  # (states, nodes)
    U, s, Vt = np.linalg.svd(L, full_matrices=False)
    ratio = (s[-1] / s[0]) ** 2 if s[0] > 0 else 0.0
    if ratio < rcond:
        dup = len(np.unique(sigmas)) < M
        hint = " (duplicated sigma values)" if dup else ""
        raise SingularGramianError(
            f"controllability Gramian is near-singular: rcond {ratio:.3e} < {rcond:.1e}{hint}"
        )
    drift = (expm(A_stack * T) @ x0.reshape(-1))
    d = xhat.reshape(-1) - drift
    coeff = U.T @ d
    costate = U @ (coeff / s**2)
    # u(t_k) = g_k^T lambda, evaluated through the factorisation for stability
    u = (Vt.T @ (coeff / s)) / np.sqrt(weights)
    energy = float(weights @ u**2)

    xT = simulate(pair, sigmas, x0, u, T, steps)
    err = float(np.max(np.linalg.norm(xT - xhat, axis=1)))
    return SteeringResult(
        sigmas=sigmas,
        T=float(T),
        steps=int(steps),
        times=times,
        control_samples=u,
        terminal_error=err,
        control_energy=energy,
        gramian_rcond=float(ratio),
        costate=costate,
        A_stack=A_stack,
        b_stack=b_stack,
    )
