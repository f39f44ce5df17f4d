"""Explicit controllable ensemble pairs for minimal patterns.

The pair is ``A(sigma) = (kappa * sigma + 1) * A0`` and ``b(sigma) = b0`` on
``sigma in [0, 1]``.  ``A0`` is in canonical block form: block ``i`` is a
cyclic shift whose star-entries multiply to ``r_i ** n_i``, with radii
``r_1 < r_2 < ... < r_N`` so every block's spectrum lives on its own circle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import kalman_rank
from .reduction import MinimalPattern

__all__ = [
    "SynthesisError",
    "EnsemblePair",
    "block_radii",
    "synthesize_finite_pair",
    "compute_kappa",
    "build_ensemble_pair",
]

DELTA0 = 1e-2
RETRY_BUDGET = 32


class SynthesisError(RuntimeError):
    """Perturbation retries ran out before a controllable pair was found."""


def _cycle_positions(offset: int, size: int) -> list:
    # matrix positions (row, col) of a block's cycle edges s+j -> s+j+1
    return [(offset + (j + 1) % size, offset + j) for j in range(size)]


def block_radii(A0, cycle_sizes) -> np.ndarray:
    """``|product of block i's cycle entries| ** (1 / n_i)`` for each block."""
    A0 = np.asarray(A0, dtype=float)
    radii = []
    s = 0
    for size in cycle_sizes:
        prod = 1.0
        for r, c in _cycle_positions(s, size):
            prod *= A0[r, c]
        radii.append(abs(prod) ** (1.0 / size))
        s += size
    return np.array(radii)


@dataclass(frozen=True)
class EnsemblePair:
    A0: np.ndarray
    b0: np.ndarray
    kappa: float
    cycle_sizes: tuple

    def __post_init__(self):
        A0 = np.array(self.A0, dtype=float)
        b0 = np.array(self.b0, dtype=float).reshape(-1)
        n = b0.shape[0]
        if A0.shape != (n, n):
            raise ValueError(f"A0 must be {n}x{n}, got {A0.shape}")
        if sum(self.cycle_sizes) != n:
            raise ValueError("cycle sizes must add up to n")
        A0.setflags(write=False)
        b0.setflags(write=False)
        object.__setattr__(self, "A0", A0)
        object.__setattr__(self, "b0", b0)
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "cycle_sizes", tuple(int(k) for k in self.cycle_sizes))

    @property
    def n(self) -> int:
        return self.b0.shape[0]

    @property
    def r0(self) -> np.ndarray:
        return block_radii(self.A0, self.cycle_sizes)

    def rho(self, sigma):
        return self.kappa * np.asarray(sigma, dtype=float) + 1.0

    def A(self, sigma) -> np.ndarray:
        return self.rho(sigma) * self.A0

    def radii(self, sigma) -> np.ndarray:
        return self.rho(sigma) * self.r0

    def offsets(self) -> list:
        out, s = [], 0
        for size in self.cycle_sizes:
            out.append(s)
            s += size
        return out

    def to_dict(self) -> dict:
        return {
            "A0": self.A0.tolist(),
            "b0": self.b0.tolist(),
            "kappa": self.kappa,
            "cycle_sizes": list(self.cycle_sizes),
            "r0": self.r0.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EnsemblePair":
        return cls(
            A0=np.array(data["A0"], dtype=float).reshape(len(data["b0"]), len(data["b0"])),
            b0=data["b0"],
            kappa=data["kappa"],
            cycle_sizes=tuple(data["cycle_sizes"]),
        )


def _default_values(K: MinimalPattern) -> tuple[np.ndarray, np.ndarray]:
    n = K.n
    A0 = np.zeros((n, n))
    b0 = np.zeros(n)
    for i, (off, size) in enumerate(zip(K.offsets, K.cycle_sizes)):
        for r, c in _cycle_positions(off, size):
            A0[r, c] = i + 1.0
    control = K.base.n
    for u, v in K.connector_edges():
        if u == control:
            b0[v] = 1.0
        else:
            A0[v, u] = 1.0
    return A0, b0


def synthesize_finite_pair(
    K: MinimalPattern, seed: int | None = None, delta0: float = DELTA0, budget: int = RETRY_BUDGET
) -> tuple[np.ndarray, np.ndarray]:
    """A controllable ``(A0, b0)`` compliant with ``K`` with increasing block radii.

    Block ``i`` (1-based) gets every cycle entry equal to ``i``; connector and
    control entries are 1.  If that pair is not controllable, every
    star-entry gets independent uniform noise in ``[-delta, delta]`` and
    ``delta`` halves on each retry.
    """
    if K.base.m != 1:
        raise ValueError("synthesis needs a single control-node")
    A0, b0 = _default_values(K)
    n = K.n
    if n == 0 or kalman_rank(A0, b0)[0] == n:
        return A0, b0
    a_mask, b_mask = K.base.matrices()
    b_mask = b_mask[:, 0]
    rng = np.random.default_rng(0 if seed is None else seed)
    delta = delta0
    for _ in range(budget):
        A1 = A0 + np.where(a_mask, rng.uniform(-delta, delta, A0.shape), 0.0)
        b1 = b0 + np.where(b_mask, rng.uniform(-delta, delta, n), 0.0)
        radii = block_radii(A1, K.cycle_sizes)
        ok = (
            np.all(A1[a_mask] > 0)
            and np.all(b1[b_mask] > 0)
            and np.all(np.diff(radii) > 0)
            and kalman_rank(A1, b1)[0] == n
        )
        if ok:
            return A1, b1
        delta /= 2
    raise SynthesisError(f"no controllable pair after {budget} perturbation rounds")


def compute_kappa(r0) -> float:
    """Half the smallest relative gap between consecutive radii (1 for one block)."""
    r0 = np.asarray(r0, dtype=float)
    if np.any(r0 <= 0) or np.any(np.diff(r0) <= 0):
        raise ValueError("radii must be positive and strictly increasing")
    if r0.size <= 1:
        return 1.0
    return 0.5 * float(np.min(r0[1:] / r0[:-1] - 1.0))


def build_ensemble_pair(K: MinimalPattern, seed: int | None = None) -> EnsemblePair:
    A0, b0 = synthesize_finite_pair(K, seed)
    r0 = block_radii(A0, K.cycle_sizes)
    return EnsemblePair(A0, b0, compute_kappa(r0), K.cycle_sizes)
