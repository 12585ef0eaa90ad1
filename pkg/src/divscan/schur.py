"""Entrywise-product (Schur) dynamical maps with a tridiagonal Toeplitz mask.

Lambda_t(X) = A_t o X where A_t has ones on the diagonal and t on the first
off-diagonals. Unit diagonal makes the map TP for every t; it is CP exactly
when A_t is PSD, i.e. for t in [0, 1/2] (the truncated mask's eigenvalues are
1 + 2t cos(k pi/(n+1)) > 0 there). The canonical witness is the hopping
matrix itself: Lambda_t maps it to t times itself, so its trace norm grows
linearly with the constant slope 2 sum_k |cos(k pi/(n+1))| and the family is
not even P-divisible despite being CPTP at every t.
"""

from __future__ import annotations

import numpy as np

from ._errors import OutsideValidityWindow
from .channels import Channel
from .divisibility import DynamicalFamily, make_dynamical_family
from .operators import trace_norm

_WINDOW_ATOL = 1e-12


def toeplitz_a(n: int, t: float) -> np.ndarray:
    """The mask matrix: ones on the diagonal, t on the off-diagonals."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if t < 0:
        raise ValueError(f"need t >= 0, got {t}")
    a = np.eye(n)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = t
    a[idx + 1, idx] = t
    return a


def toeplitz_spectrum(n: int, t: float) -> np.ndarray:
    """Eigenvalues 1 + 2 t cos(k pi/(n+1)), k = 1..n, ascending."""
    k = np.arange(1, n + 1)
    return np.sort(1.0 + 2.0 * t * np.cos(k * np.pi / (n + 1)))


def cosine_abs_sum(n: int) -> float:
    k = np.arange(1, n + 1)
    return float(np.sum(np.abs(np.cos(k * np.pi / (n + 1)))))


def hopping_witness(n: int) -> np.ndarray:
    """Zero diagonal, ones on the first off-diagonals; eigenvalues
    2 cos(k pi/(n+1))."""
    return toeplitz_a(n, 1.0) - np.eye(n)


def cp_block_witness(n: int) -> np.ndarray:
    """The doubled-space witness: the hopping matrix embedded in the top
    corner block of H (x) H. (I (x) Lambda_t) maps it to t times itself."""
    e00 = np.zeros((n, n))
    e00[0, 0] = 1.0
    return np.kron(e00, hopping_witness(n))


def schur_channel(n: int, t: float) -> Channel:
    """X -> A_t o X as a Kraus channel (diagonal Kraus operators from the
    eigendecomposition of A_t). Raises OutsideValidityWindow for t outside
    [0, 1/2], where the mask stops being PSD."""
    if t < -_WINDOW_ATOL or t > 0.5 + _WINDOW_ATOL:
        raise OutsideValidityWindow(f"t={t} outside the CP window [0, 0.5]")
    a = toeplitz_a(n, max(t, 0.0))
    vals, vecs = np.linalg.eigh(a)
    vals = np.clip(vals, 0.0, None)  # boundary t=1/2: clip eigensolver noise
    kraus = [np.diag(np.sqrt(v) * vecs[:, i]) for i, v in enumerate(vals)]
    return Channel(d=n, kraus=kraus)


def witness_growth(n: int, grid) -> list[tuple[float, float, float]]:
    """(t, trace_norm, derivative) rows for the hopping witness.

    The norm is evaluated honestly (entrywise product, then eigenvalues);
    the derivative column is the exact constant 2 sum|cos(k pi/(n+1))|.
    """
    x = hopping_witness(n)
    slope = 2.0 * cosine_abs_sum(n)
    rows = []
    for t in np.asarray(grid, dtype=float):
        masked = toeplitz_a(n, float(t)) * x  # entrywise; exact at finite n
        rows.append((float(t), trace_norm(masked), slope))
    return rows


def make_schur_family(n: int, t_domain=(0.0, 0.5)) -> DynamicalFamily:
    lo, hi = float(t_domain[0]), float(t_domain[1])
    if lo < 0 or hi > 0.5:
        raise OutsideValidityWindow(f"domain [{lo}, {hi}] exceeds the CP window [0, 0.5]")
    return make_dynamical_family(
        lambda t: schur_channel(n, t),
        d=n,
        t_domain=(lo, hi),
        name=f"schur(n={n})",
        witnesses=(hopping_witness(n),),
        cp_witnesses=(cp_block_witness(n),),
    )
