"""The four-channel idempotent algebra on C^(nk) and its divisor calculus.

The Hilbert space splits into n blocks of dimension k. Four commuting TP
channels form a decreasing idempotent family (p_i p_j = p_max(i,j)):

    I : identity
    E : X -> sum_i P_i X P_i            (keep block-diagonal part)
    B : X -> sum_i (tr(P_i X)/k) P_i    (dephase inside each block)
    D : X -> (tr X / nk) I              (dephase everything)

Phi(a,b,c,d) = aI + bE + cB + dD. Closed-form Choi spectrum, CP and
positivity conditions, and the left-divisor coefficients for families
Lambda_t = Phi(a_t,b_t,c_t,d_t) all live here.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType

import numpy as np

from ._errors import DegenerateDenominator, HypothesisViolated, InvalidFamily
from .channels import Channel
from .divisibility import DynamicalFamily, make_dynamical_family
from .operators import vec


@dataclass(frozen=True)
class IdempotentParams:
    n: int
    k: int
    a: float
    b: float
    c: float
    d: float

    def coeffs(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


def _block_projectors(n: int, k: int) -> list[np.ndarray]:
    ps = []
    for i in range(n):
        p = np.zeros((n * k, n * k))
        p[i * k : (i + 1) * k, i * k : (i + 1) * k] = np.eye(k)
        ps.append(p)
    return ps


@lru_cache(maxsize=None)
def _basis_supers(n: int, k: int):
    d = n * k
    projs = _block_projectors(n, k)
    s_i = np.eye(d * d, dtype=complex)
    s_e = sum(np.kron(p, p) for p in projs).astype(complex)
    s_b = sum(np.outer(vec(p), vec(p)) / k for p in projs).astype(complex)
    vi = vec(np.eye(d))
    s_d = np.outer(vi, vi).astype(complex) / d
    return s_i, s_e, s_b, s_d


@lru_cache(maxsize=None)
def build_basis(n: int, k: int):
    """The four basis channels as a read-only mapping {'I','E','B','D'}.

    Each carries Kraus operators (so CP is structural) and the exact
    superoperator. Cached per (n, k); lru_cache keeps population atomic
    enough for concurrent callers.
    """
    if n < 1 or k < 1:
        raise ValueError(f"need n, k >= 1, got n={n}, k={k}")
    d = n * k
    projs = _block_projectors(n, k)
    s_i, s_e, s_b, s_d = _basis_supers(n, k)

    kraus_b = []
    for i in range(n):
        for a in range(k):
            for b in range(k):
                m = np.zeros((d, d))
                m[i * k + a, i * k + b] = 1.0 / np.sqrt(k)
                kraus_b.append(m)
    kraus_d = []
    for a in range(d):
        for b in range(d):
            m = np.zeros((d, d))
            m[a, b] = 1.0 / np.sqrt(d)
            kraus_d.append(m)

    basis = {
        "I": Channel(d=d, kraus=[np.eye(d)], super_matrix=s_i),
        "E": Channel(d=d, kraus=projs, super_matrix=s_e),
        "B": Channel(d=d, kraus=kraus_b, super_matrix=s_b),
        "D": Channel(d=d, kraus=kraus_d, super_matrix=s_d),
    }
    return MappingProxyType(basis)


def phi(params: IdempotentParams) -> Channel:
    """aI + bE + cB + dD as a superoperator-backed channel (coefficients may
    be negative, so no Kraus form is attached)."""
    s_i, s_e, s_b, s_d = _basis_supers(params.n, params.k)
    s = params.a * s_i + params.b * s_e + params.c * s_b + params.d * s_d
    return Channel(d=params.n * params.k, super_matrix=s)


def choi_spectrum_closed_form(params: IdempotentParams):
    """Choi spectrum of Phi(a,b,c,d) as four (eigenvalue, multiplicity) pairs:

        nk a + k b + c/k + d/(nk)   x 1
        k b + c/k + d/(nk)          x (n-1)
        c/k + d/(nk)                x n(k^2-1)
        d/(nk)                      x nk^2(n-1)

    Multiplicities sum to (nk)^2.
    """
    n, k = params.n, params.k
    a, b, c, d = params.coeffs()
    tail = c / k + d / (n * k)
    return [
        (n * k * a + k * b + tail, 1),
        (k * b + tail, n - 1),
        (tail, n * (k * k - 1)),
        (d / (n * k), n * k * k * (n - 1)),
    ]


def cp_condition(params: IdempotentParams, atol: float = 1e-12) -> bool:
    """CP iff all four closed-form Choi eigenvalues are nonnegative."""
    return all(val >= -atol for val, _ in choi_spectrum_closed_form(params))


def two_positive_necessary(params: IdempotentParams, atol: float = 1e-12) -> bool:
    """Necessary conditions for 2-positivity (no converse implemented)."""
    n, k = params.n, params.k
    a, b, c, d = params.coeffs()
    tail = c / k + d / (n * k)
    return bool((2 * a + 2 * b + tail >= -atol) and (tail >= -atol) and (d >= -atol))


def two_positive_probe_choi(params: IdempotentParams) -> np.ndarray:
    """Dense route for the 2-positivity conditions: the Choi matrix of
    I_2 (x) Phi compressed to the span of two basis vectors inside one block.
    Its spectrum is {2a+2b+c/k+d/nk (x1), c/k+d/nk (x 2k-1), d/nk (x 2k(n-1))}.
    """
    if params.k < 2:
        raise HypothesisViolated("probe needs two basis vectors in one block (k >= 2)")
    d = params.n * params.k
    ch = phi(params)
    e = np.eye(d)
    c2 = np.zeros((2 * d, 2 * d), dtype=complex)
    for i in range(2):
        for j in range(2):
            blk = ch.apply(np.outer(e[i], e[j]))
            c2[i * d : (i + 1) * d, j * d : (j + 1) * d] = blk
    return c2


def l_positive_condition(params: IdempotentParams, l: int, norm_ce_sl: float | None = None, atol: float = 1e-12) -> bool:
    """Evaluate b*||C_E||_S(l) + c + d + a*l >= 0 (stated hypothesis a,b <= 0).

    l = 1 defaults the norm to k; for l >= 2 the Schmidt-rank-constrained
    norm is caller-supplied (computing it generically is out of scope).
    Raises HypothesisViolated when a > 0 or b > 0, or when l is out of range.
    """
    n, k = params.n, params.k
    a, b, c, d = params.coeffs()
    if a > atol or b > atol:
        raise HypothesisViolated(f"condition stated for a, b <= 0; got a={a}, b={b}")
    if not 1 <= l <= n * k:
        raise HypothesisViolated(f"need 1 <= l <= nk = {n * k}, got l={l}")
    if norm_ce_sl is None:
        if l != 1:
            raise HypothesisViolated("||C_E||_S(l) must be supplied for l >= 2")
        norm_ce_sl = float(k)
    return bool(b * norm_ce_sl + c + d + a * l >= -atol)


def positivity_sufficient(n: int, k: int, alpha: float, beta: float, gamma: float, delta: float, atol: float = 1e-12) -> bool:
    """Sufficient (not necessary) condition for Phi(alpha..delta) positive.

    Either all four coefficients are nonnegative, or alpha, delta >= 0,
    beta <= 0 and beta + gamma/k + delta/(nk) >= 0. The second branch follows
    from bounding each block of the output from below by
    (beta + gamma/k + delta/nk) * tr(X_block) * (unit direction).
    """
    if min(alpha, beta, gamma, delta) >= -atol:
        return True
    w = beta + gamma / k + delta / (n * k)
    return bool(alpha >= -atol and delta >= -atol and beta <= atol and w >= -atol)


def _partial_sums(coeffs) -> list[float]:
    out = []
    acc = 0.0
    for c in coeffs:
        acc += c
        out.append(acc)
    return out


_SUM_NAMES = ("a_s", "a_s+b_s", "a_s+b_s+c_s", "a_s+b_s+c_s+d_s")


def divisor_coeffs(a_s, b_s, c_s, d_s, a_t, b_t, c_t, d_t, atol: float = 1e-12):
    """Closed-form left-divisor coefficients: Phi(out) . Phi(s) = Phi(t).

        alpha = a_t/a_s
        beta  = (a_s b_t - b_s a_t) / (a_s (a_s+b_s))
        gamma = ((a_s+b_s) c_t - c_s (a_t+b_t)) / ((a_s+b_s)(a_s+b_s+c_s))
        delta = ((a_s+b_s+c_s) d_t - d_s (a_t+b_t+c_t))
                 / ((a_s+b_s+c_s)(a_s+b_s+c_s+d_s))

    Raises DegenerateDenominator naming the vanished partial sum.
    """
    sums = _partial_sums((a_s, b_s, c_s, d_s))
    for name, val in zip(_SUM_NAMES, sums):
        if abs(val) <= atol:
            raise DegenerateDenominator(f"partial sum {name} vanishes ({val:.3e})")
    s1, s2, s3, s4 = sums
    alpha = a_t / s1
    beta = (s1 * b_t - b_s * a_t) / (s1 * s2)
    gamma = (s2 * c_t - c_s * (a_t + b_t)) / (s2 * s3)
    delta = (s3 * d_t - d_s * (a_t + b_t + c_t)) / (s3 * s4)
    return (alpha, beta, gamma, delta)


def idempotent_product(x, y):
    """Coefficients of p(x) p(y) over a decreasing idempotent family:
    z_i = y_i * Sx_i + x_i * Sy_{i-1} with S the partial-sum operator."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"coefficient vectors differ in length: {x.shape} vs {y.shape}")
    sx = np.cumsum(x)
    sy = np.concatenate(([0.0], np.cumsum(y)[:-1]))
    return y * sx + x * sy


def solve_left_divisor(x, z, atol: float = 1e-12):
    """Solve idempotent_product(y, x) = z for y.

    Triangular recursion: y_1 = z_1/x_1 and
    y_i = z_i/Sx_i - x_i Sz_{i-1} / (Sx_{i-1} Sx_i); equivalently the partial
    sums satisfy Sy_i = Sz_i / Sx_i. Requires every Sx_i nonzero.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.shape != z.shape:
        raise ValueError(f"coefficient vectors differ in length: {x.shape} vs {z.shape}")
    sx = np.cumsum(x)
    for i, val in enumerate(sx):
        if abs(val) <= atol:
            raise DegenerateDenominator(f"partial sum of x through index {i} vanishes ({val:.3e})")
    sz = np.cumsum(z)
    y = np.empty_like(x)
    y[0] = z[0] / x[0]
    for i in range(1, len(x)):
        y[i] = z[i] / sx[i] - x[i] * sz[i - 1] / (sx[i - 1] * sx[i])
    return y


def make_family(coeff_fns, n: int, k: int, t_domain, name: str = "", grid_points: int = 41,
                witnesses=(), cp_witnesses=()) -> DynamicalFamily:
    """Family Lambda_t = Phi(a_t, b_t, c_t, d_t) on C^(nk).

    coeff_fns maps t to the coefficient 4-tuple. Validity at construction:
    coefficients sum to 1 (TP) and the CP condition holds at every grid point;
    InvalidFamily carries the first offending t.
    """
    lo, hi = float(t_domain[0]), float(t_domain[1])
    for t in np.linspace(lo, hi, grid_points):
        a, b, c, d = coeff_fns(float(t))
        if abs(a + b + c + d - 1.0) > 1e-9:
            raise InvalidFamily(f"coefficients do not sum to 1 at t={t}", t=float(t))
        if not cp_condition(IdempotentParams(n, k, a, b, c, d)):
            raise InvalidFamily(f"CP condition fails at t={t}", t=float(t))

    def channel_at(t: float) -> Channel:
        a, b, c, d = coeff_fns(t)
        return phi(IdempotentParams(n, k, a, b, c, d))

    return make_dynamical_family(
        channel_at,
        d=n * k,
        t_domain=(lo, hi),
        name=name or f"idempotent(n={n},k={k})",
        witnesses=witnesses,
        cp_witnesses=cp_witnesses,
        validate=False,  # already validated through the closed forms above
    )


def classify_regime(n: int, k: int, s_coeffs, t_coeffs, atol: float = 1e-12) -> str:
    """Divisor-based regime label for the step s -> t.

    'CP' when the divisor meets the CP condition; within the a,b <= 0
    hypothesis, 'P-not-CP' when k*beta + alpha + gamma + delta >= 0 and
    'not-P' when it is negative; 'undetermined' otherwise.
    """
    alpha, beta, gamma, delta = divisor_coeffs(*s_coeffs, *t_coeffs)
    div = IdempotentParams(n, k, alpha, beta, gamma, delta)
    if cp_condition(div, atol=atol):
        return "CP"
    if alpha <= atol and beta <= atol:
        if l_positive_condition(div, 1, atol=atol):
            return "P-not-CP"
        return "not-P"
    return "undetermined"


def truncation_report(s_coeffs, t_coeffs, k: int, n_list):
    """Divisor conditions as the number of blocks grows (fixed k): the finite
    stand-in for the infinite-dimensional limit. Divisor coefficients do not
    depend on n; the positivity conditions do."""
    alpha, beta, gamma, delta = divisor_coeffs(*s_coeffs, *t_coeffs)
    rows = []
    for n in n_list:
        div = IdempotentParams(int(n), k, alpha, beta, gamma, delta)
        rows.append(
            {
                "n": int(n),
                "alpha": alpha,
                "beta": beta,
                "gamma": gamma,
                "delta": delta,
                "cp": cp_condition(div),
                "two_positive": two_positive_necessary(div),
                "l1": l_positive_condition(div, 1) if alpha <= 0 and beta <= 0 else None,
            }
        )
    return rows
