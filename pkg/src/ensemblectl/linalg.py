"""Controllability-matrix helpers shared by synthesis and verification."""
from __future__ import annotations

import numpy as np

RANK_TOL = 1e-9


def kalman_matrix(A, b) -> np.ndarray:
    """``[b, Ab, ..., A^(n-1) b]`` for a single input column ``b``."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    n = A.shape[0]
    if A.shape != (n, n) or b.shape != (n,):
        raise ValueError(f"shape mismatch: A {A.shape}, b {b.shape}")
    cols = np.empty((n, n))
    v = b.copy()
    for k in range(n):
        cols[:, k] = v
        v = A @ v
    return cols


def kalman_rank(A, b, tol: float = RANK_TOL) -> tuple[int, float]:
    """Numeric rank of the Kalman matrix and its margin ``s_min / s_max``.

    A singular value counts towards the rank when it exceeds ``tol`` times
    the largest one.
    """
    C = kalman_matrix(A, b)
    if C.size == 0:
        return 0, 1.0
    s = np.linalg.svd(C, compute_uv=False)
    if s[0] == 0.0:
        return 0, 0.0
    return int(np.sum(s > tol * s[0])), float(s[-1] / s[0])
