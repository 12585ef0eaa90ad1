"""Divisibility scans for dynamical families.

The workhorse criterion: along a P-divisible family the trace norm of every
Hermitian witness is non-increasing, and along a CP-divisible family the same
holds for witnesses on the doubled space under I (x) Lambda_t. A witness whose
norm curve has positive slope certifies NOT divisible; absence of growth over
a witness library is evidence, not proof (the converse direction needs
surjectivity, which a numerical scan cannot establish).

Derivatives are central differences with stencil width h; any flagged slope
is re-checked at h/10 and must stay above tau_slope/2 to count, which filters
stencil artifacts near kinks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._errors import DomainExceeded, InvalidFamily
from .channels import Channel, extend_channel
from .operators import (
    TAU_SLOPE,
    random_hermitian,
    random_projector_difference,
    trace_norm,
)

NOT_P_DIVISIBLE = "NOT_P_DIVISIBLE"
NOT_CP_DIVISIBLE = "NOT_CP_DIVISIBLE"
P_EVIDENCE = "P_EVIDENCE"
CP_EVIDENCE = "CP_EVIDENCE"
DIVISIBLE_KERNEL_OK = "DIVISIBLE_KERNEL_OK"
NOT_DIVISIBLE = "NOT_DIVISIBLE"


@dataclass
class DynamicalFamily:
    """Time-indexed family of channels on a fixed d-dimensional system.

    channel_at(t) must return a Channel for every t in t_domain. Canonical
    witnesses travel with the family so scans probe the operators the family
    was designed around, on top of the generic library.
    """

    d: int
    t_domain: tuple[float, float]
    channel_at: object
    name: str = ""
    witnesses: tuple = ()
    cp_witnesses: tuple = ()

    def channel(self, t: float) -> Channel:
        lo, hi = self.t_domain
        if t < lo - 1e-12 or t > hi + 1e-12:
            raise DomainExceeded(f"t={t} outside domain [{lo}, {hi}]")
        return self.channel_at(t)


def make_dynamical_family(
    channel_at,
    d: int,
    t_domain: tuple[float, float],
    name: str = "",
    witnesses=(),
    cp_witnesses=(),
    validate: bool = True,
    grid_points: int = 21,
    cp_atol: float = 1e-9,
    tp_atol: float = 1e-8,
) -> DynamicalFamily:
    """Build a family and check CP + TP on a validation grid.

    Kraus-form channels are CP by construction and only get the TP check;
    super-only channels get a dense Choi PSD test. Raises InvalidFamily with
    the first offending t.
    """
    fam = DynamicalFamily(
        d=d,
        t_domain=(float(t_domain[0]), float(t_domain[1])),
        channel_at=channel_at,
        name=name,
        witnesses=tuple(witnesses),
        cp_witnesses=tuple(cp_witnesses),
    )
    if validate:
        for t in np.linspace(fam.t_domain[0], fam.t_domain[1], grid_points):
            ch = fam.channel(float(t))
            if not ch.is_tp(atol=tp_atol):
                raise InvalidFamily(f"{name or 'family'} not TP at t={t}", t=float(t))
            if ch.kraus is None and not ch.is_cp(atol=cp_atol):
                raise InvalidFamily(f"{name or 'family'} not CP at t={t}", t=float(t))
    return fam


def default_witnesses(d: int, rng: np.random.Generator, n_proj: int = 20, n_herm: int = 20, pair_cap: int = 300):
    """The generic witness library: all E_ii - E_jj diagonal differences
    (seeded subsample above pair_cap), random rank-1 projector differences,
    and random Hermitian samples. Returns (id, matrix) pairs."""
    out = []
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    if len(pairs) > pair_cap:
        idx = rng.choice(len(pairs), size=pair_cap, replace=False)
        pairs = [pairs[i] for i in sorted(idx)]
    for i, j in pairs:
        e = np.zeros(d)
        e[i], e[j] = 1.0, -1.0
        out.append((f"diag({i}-{j})", np.diag(e).astype(complex)))
    for r in range(n_proj):
        out.append((f"projdiff-{r}", random_projector_difference(d, rng)))
    for r in range(n_herm):
        out.append((f"herm-{r}", random_hermitian(d, rng)))
    return out


@dataclass
class DivisibilityReport:
    verdict: str
    mode: str
    witness_id: str | None = None
    witness_t: float | None = None
    derivative: float | None = None
    witness_matrix: np.ndarray | None = None
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        wm = None
        if self.witness_matrix is not None:
            wm = [
                [[float(z.real), float(z.imag)] for z in row]
                for row in np.asarray(self.witness_matrix, dtype=complex)
            ]
        return {
            "verdict": self.verdict,
            "mode": self.mode,
            "witness_id": self.witness_id,
            "witness_t": self.witness_t,
            "derivative": self.derivative,
            "witness_matrix": wm,
            "notes": list(self.notes),
        }

    def csv_rows(self):
        """(t, witness_id, trace_norm, derivative) per grid point per witness."""
        return list(self.rows)


def _default_grid(fam: DynamicalFamily, h: float, points: int = 51) -> np.ndarray:
    lo, hi = fam.t_domain
    return np.linspace(lo + h, hi - h, points)


def _check_grid(fam: DynamicalFamily, grid: np.ndarray, h: float) -> None:
    lo, hi = fam.t_domain
    for t in grid:
        if t - h < lo - 1e-12 or t + h > hi + 1e-12:
            raise DomainExceeded(
                f"stencil point {t} +/- {h} leaves the family domain [{lo}, {hi}]"
            )


def _scan(fam, grid, h, witnesses, tau_slope, mode, early_stop) -> DivisibilityReport:
    extended = mode == "CP"

    chan_cache: dict[float, Channel] = {}

    def chan(tau: float) -> Channel:
        if tau not in chan_cache:
            base = fam.channel(tau)
            chan_cache[tau] = extend_channel(base) if extended else base
        return chan_cache[tau]

    def norm_at(tau: float, w: np.ndarray) -> float:
        return trace_norm(chan(tau).apply(w), atol=1e-7)

    rows = []
    notes = []
    best = None  # (derivative, t, id, matrix)
    for wid, w in witnesses:
        for t in grid:
            t = float(t)
            f0 = norm_at(t, w)
            deriv = (norm_at(t + h, w) - norm_at(t - h, w)) / (2 * h)
            rows.append((t, wid, f0, deriv))
            if deriv > tau_slope:
                fine = (norm_at(t + h / 10, w) - norm_at(t - h / 10, w)) / (2 * h / 10)
                if fine > tau_slope / 2:
                    if best is None or deriv > best[0]:
                        best = (deriv, t, wid, w)
                else:
                    notes.append(
                        f"slope {deriv:.3e} at t={t} (witness {wid}) not confirmed at h/10; ignored"
                    )
        if best is not None and early_stop:
            # the flagged witness's full curve is in rows already; later
            # witnesses cannot change the verdict, only the argmax
            notes.append("stopped at first violating witness")
            break

    if best is not None:
        deriv, t, wid, w = best
        verdict = NOT_CP_DIVISIBLE if extended else NOT_P_DIVISIBLE
        return DivisibilityReport(
            verdict=verdict,
            mode=mode,
            witness_id=wid,
            witness_t=t,
            derivative=deriv,
            witness_matrix=w,
            rows=rows,
            notes=notes,
        )
    verdict = CP_EVIDENCE if extended else P_EVIDENCE
    notes.append("no witness growth found; evidence of divisibility, not proof")
    return DivisibilityReport(verdict=verdict, mode=mode, rows=rows, notes=notes)


def p_divisibility_scan(
    fam: DynamicalFamily,
    grid=None,
    h: float | None = None,
    witnesses=None,
    seed: int = 11,
    tau_slope: float = TAU_SLOPE,
    early_stop: bool = True,
) -> DivisibilityReport:
    """Scan d/dt ||Lambda_t(X)||_1 over a witness library.

    Requires every stencil point t +/- h to stay inside the family domain
    (DomainExceeded otherwise). witnesses=None selects the family's canonical
    witnesses followed by the default library.
    """
    lo, hi = fam.t_domain
    if h is None:
        h = 1e-4 * (hi - lo)
    grid = _default_grid(fam, h) if grid is None else np.asarray(grid, dtype=float)
    _check_grid(fam, grid, h)
    if witnesses is None:
        rng = np.random.default_rng(seed)
        witnesses = [(f"canonical-{i}", w) for i, w in enumerate(fam.witnesses)]
        witnesses += default_witnesses(fam.d, rng)
    return _scan(fam, grid, h, witnesses, tau_slope, mode="P", early_stop=early_stop)


def cp_divisibility_scan(
    fam: DynamicalFamily,
    grid=None,
    h: float | None = None,
    witnesses=None,
    seed: int = 11,
    tau_slope: float = TAU_SLOPE,
    early_stop: bool = True,
) -> DivisibilityReport:
    """Same scan under I (x) Lambda_t; witnesses live on the doubled space."""
    lo, hi = fam.t_domain
    if h is None:
        h = 1e-4 * (hi - lo)
    grid = _default_grid(fam, h) if grid is None else np.asarray(grid, dtype=float)
    _check_grid(fam, grid, h)
    if witnesses is None:
        rng = np.random.default_rng(seed)
        witnesses = [(f"canonical-{i}", w) for i, w in enumerate(fam.cp_witnesses)]
        witnesses += default_witnesses(fam.d * fam.d, rng, n_proj=10, n_herm=10, pair_cap=60)
    return _scan(fam, grid, h, witnesses, tau_slope, mode="CP", early_stop=early_stop)


def central_difference(f, t: float, h: float) -> float:
    return (f(t + h) - f(t - h)) / (2 * h)


def _null_basis(s: np.ndarray, rcond: float) -> np.ndarray:
    _, sv, vh = np.linalg.svd(s)
    if sv.size == 0 or sv[0] == 0.0:
        return vh.conj().T  # zero map: everything is kernel
    rank = int(np.sum(sv > rcond * sv[0]))
    return vh[rank:].conj().T


def kernel_inclusion_divisible(fam: DynamicalFamily, s: float, t: float, rcond: float = 1e-10) -> bool:
    """Exact divisibility test: some Phi with Lambda_t = Phi Lambda_s exists
    iff Ker(Lambda_s) is contained in Ker(Lambda_t).

    Decided from an SVD null-space basis of the source superoperator; rank
    thresholds use rcond relative to the largest singular value.
    """
    if t < s:
        raise DomainExceeded(f"need s <= t, got s={s}, t={t}")
    ss = fam.channel(s).super
    st = fam.channel(t).super
    null = _null_basis(ss, rcond)
    if null.shape[1] == 0:
        return True
    scale = float(np.linalg.norm(st, 2))
    if scale == 0.0:
        return True
    return float(np.max(np.abs(st @ null))) <= 1e-8 * scale


def kernel_inclusion_report(fam: DynamicalFamily, s: float, t: float, rcond: float = 1e-10) -> DivisibilityReport:
    ok = kernel_inclusion_divisible(fam, s, t, rcond=rcond)
    return DivisibilityReport(
        verdict=DIVISIBLE_KERNEL_OK if ok else NOT_DIVISIBLE,
        mode="kernel",
        witness_t=t,
        notes=[f"kernel inclusion Ker(L_{s}) in Ker(L_{t}): {ok}"],
    )


def intermediate_map(fam: DynamicalFamily, s: float, t: float, rcond: float = 1e-10,
                     n_samples: int = 400, seed: int = 7) -> dict:
    """Phi_{t,s} = Lambda_t . Lambda_s^{-1} through the superoperator inverse.

    Returns {"map": Channel, "cp": bool, "p": ...} where "p" is the
    sampling-based contractivity report for the connecting map (evidence,
    not proof). Propagates SingularChannel (with the singular-value
    report) when Lambda_s is not invertible at rcond; callers should fall
    back to kernel_inclusion_report in that case.
    """
    from .channels import compose, inverse, positivity_by_contractivity

    if t < s:
        raise DomainExceeded(f"need s <= t, got s={s}, t={t}")
    ch_s = fam.channel(s)
    ch_t = fam.channel(t)
    mid = compose(ch_t, inverse(ch_s, rcond=rcond))
    contr = positivity_by_contractivity(mid, n_samples=n_samples, seed=seed)
    return {"map": mid, "cp": bool(mid.is_cp()), "p": contr}
