"""Continuity-method Newton solver for det(g + ddbar phi) = C e^{tF} det(g).

The outer loop walks t from 0 to 1 with adaptive steps.  At each t a damped
Newton iteration drives the normalized residual

    r = det(g~)/det(g) - C(t) e^{tF},   C(t) = Vol_g / integral(e^{tF} dV_g)

to the sup-norm tolerance.  The Newton correction solves the linearization

    L[psi] = (det g~/det g) lap_{g~} psi = -r

by preconditioned conjugate gradients on mean-zero fields; dyadic damping
keeps the metric eigenvalues above the configured floor along the path.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from .geometry import (
    HermitianMetricField,
    det_field,
    eigenvalue_fields,
    flat_metric,
    hermitian_hessian,
    inverse_field,
    positivity_check,
)
from .grid import (
    Grid,
    GridMismatchError,
    PeriodicScalarField,
    integrate,
    make_field,
    mean_zero_project,
    mixed_hessian_symbol,
    partial_x,
    partial_z,
)


class NonPositiveMetricError(ValueError):
    """The potential left the positive cone; the caller must damp."""


class KrylovConvergenceError(RuntimeError):
    def __init__(self, achieved: float, target: float, iterations: int):
        super().__init__(
            f"linear solve stalled after {iterations} iterations: "
            f"residual {achieved:.3e}, target {target:.3e}"
        )
        self.achieved = achieved
        self.target = target
        self.iterations = iterations


@dataclass(frozen=True)
class SolverConfig:
    n: int = 1
    N: int = 64
    newton_tol: float = 1e-11
    newton_max_iter: int = 50
    t_step_initial: float = 0.1
    t_step_min: float = 1e-4
    damping_eig_floor: float = 1e-8
    krylov_tol: float = 1e-12
    krylov_max_iter: int | None = None  # defaults to 10 * N^n

    def __post_init__(self) -> None:
        for name in ("newton_tol", "t_step_initial", "t_step_min",
                     "damping_eig_floor", "krylov_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not self.t_step_min <= self.t_step_initial <= 1.0:
            raise ValueError("need t_step_min <= t_step_initial <= 1")

    @property
    def krylov_iter_cap(self) -> int:
        if self.krylov_max_iter is not None:
            return self.krylov_max_iter
        return 10 * self.N ** self.n


@dataclass(frozen=True)
class ContinuityStep:
    t: float
    newton_iters: int
    residual_sup: float
    eig_min: float
    eig_max: float
    sup_phi: float
    sup_grad_phi: float
    sup_third: float


@dataclass(frozen=True)
class ContinuityTrace:
    steps: list[ContinuityStep] = field(default_factory=list)

    def to_json_records(self) -> list[dict]:
        return [asdict(s) for s in self.steps]

    @property
    def final_t(self) -> float:
        return self.steps[-1].t if self.steps else 0.0


@dataclass(frozen=True)
class SolveResult:
    phi: PeriodicScalarField
    trace: ContinuityTrace
    converged: bool
    t_reached: float
    message: str = ""


@dataclass(frozen=True)
class YauReport:
    """Empirically monitored bounded quantities of the a-priori estimates."""

    sup_phi: float
    sup_grad_phi: float
    eig_min: float
    eig_max: float
    sup_third: float


# ---------------------------------------------------------------------------
# residual and linearization

def compatibility_constant(F: PeriodicScalarField, g: HermitianMetricField) -> float:
    """C with C * integral(e^F dV_g) = Vol_g(M)."""
    if not F.is_real:
        raise ValueError("F must be real")
    w = det_field(g).values.real
    vol = float(np.mean(w))
    den = float(np.mean(np.exp(F.values.real) * w))
    return vol / den


def _metric_and_checks(g, phi):
    gt = HermitianMetricField(g.grid, g.mats + hermitian_hessian(phi))
    rep = positivity_check(gt)
    if not rep.is_positive:
        raise NonPositiveMetricError(
            f"metric from potential is not positive (min eig {rep.min_eig:.3e} "
            f"at {rep.argmin_point})"
        )
    return gt


def ma_residual(
    phi: PeriodicScalarField,
    F: PeriodicScalarField,
    t: float,
    g: HermitianMetricField,
) -> PeriodicScalarField:
    """r = det(g + ddbar phi)/det(g) - C(t) e^{tF}; integrates to zero in dV_g."""
    if phi.grid != g.grid or F.grid != g.grid:
        raise GridMismatchError("phi, F and g must share a grid")
    gt = _metric_and_checks(g, phi)
    tF = make_field(g.grid, t * F.values.real)
    C = compatibility_constant(tF, g)
    ratio = det_field(gt).values.real / det_field(g).values.real
    r = ratio - C * np.exp(tF.values.real)
    return make_field(g.grid, r)


def linearized_apply(
    psi: PeriodicScalarField,
    phi: PeriodicScalarField,
    g: HermitianMetricField,
) -> PeriodicScalarField:
    """L[psi] = (det g~/det g) * lap_{g~} psi; annihilates constants."""
    gt = _metric_and_checks(g, phi)
    op = _LinearizedOperator(g, gt)
    return make_field(g.grid, op.apply_L(psi.values.real))


class _LinearizedOperator:
    """Precomputed pointwise data for repeated applications of L.

    B[psi] = -det(g~) lap_{g~} psi = -sum adj(g~)[k,j] d_j dbar_k psi is
    self-adjoint and positive semidefinite in the plain L2 inner product;
    L[psi] = -B[psi]/det(g).
    """

    def __init__(self, g: HermitianMetricField, gt: HermitianMetricField):
        self.grid = g.grid
        n = g.grid.n
        self.det_g = det_field(g).values.real
        det_gt = det_field(gt).values.real
        ginv = inverse_field(gt).mats
        # coefficient of d_j dbar_k psi inside det(g~) * lap_{g~}
        self.coef = np.einsum("...kj->...jk", ginv) * det_gt[..., None, None]
        self.symbols = [
            [mixed_hessian_symbol(self.grid, j, k) for k in range(n)]
            for j in range(n)
        ]

    def apply_B(self, u: np.ndarray) -> np.ndarray:
        spec = np.fft.fftn(u)
        n = self.grid.n
        acc = np.zeros(self.grid.shape, dtype=complex)
        for j in range(n):
            for k in range(n):
                h = np.fft.ifftn(spec * self.symbols[j][k])
                acc += self.coef[..., j, k] * h
        return -acc.real

    def apply_L(self, u: np.ndarray) -> np.ndarray:
        return -self.apply_B(u) / self.det_g

    def precondition(self, r: np.ndarray) -> np.ndarray:
        """Apply the inverse of the flat operator -lap_flat/1 = -(1/4)Delta."""
        spec = np.fft.fftn(r)
        sym = np.zeros(self.grid.shape)
        for j in range(self.grid.n):
            sym = sym - self.symbols[j][j].real  # -(1/4)Delta symbol, >= 0
        out = np.zeros_like(spec)
        np.divide(spec, sym, out=out, where=sym > 0)
        return np.fft.ifftn(out).real


def solve_linearized(
    rhs: PeriodicScalarField,
    phi: PeriodicScalarField,
    g: HermitianMetricField,
    cfg: SolverConfig,
) -> PeriodicScalarField:
    """Mean-zero psi with ||L[psi] - rhs||_sup <= krylov_tol * ||rhs||_sup."""
    gt = _metric_and_checks(g, phi)
    op = _LinearizedOperator(g, gt)
    return make_field(g.grid, _pcg(op, rhs.values.real, cfg))


def _project_compatible(rhs: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Project rhs against constants in the weighted inner product."""
    return rhs - np.mean(rhs * weight) / np.mean(weight)


def _pcg(op: _LinearizedOperator, rhs: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    rhs = _project_compatible(rhs, op.det_g)
    rhs_sup = float(np.max(np.abs(rhs)))
    if rhs_sup == 0.0:
        return np.zeros_like(rhs)
    target = cfg.krylov_tol * rhs_sup

    b = -op.det_g * rhs
    b = b - np.mean(b)
    x = np.zeros_like(b)
    r = b.copy()
    z = op.precondition(r)
    p = z.copy()
    rz = float(np.mean(r * z))
    achieved = np.inf
    for it in range(cfg.krylov_iter_cap):
        achieved = float(np.max(np.abs(r / op.det_g)))
        if achieved <= target:
            return x - np.mean(x)
        Bp = op.apply_B(p)
        alpha = rz / float(np.mean(p * Bp))
        x += alpha * p
        r -= alpha * Bp
        r -= np.mean(r)
        z = op.precondition(r)
        rz_new = float(np.mean(r * z))
        p = z + (rz_new / rz) * p
        rz = rz_new
    achieved = float(np.max(np.abs(r / op.det_g)))
    if achieved <= target:
        return x - np.mean(x)
    raise KrylovConvergenceError(achieved, target, cfg.krylov_iter_cap)


# ---------------------------------------------------------------------------
# monitored quantities

def yau_estimate_report(phi: PeriodicScalarField, g: HermitianMetricField) -> YauReport:
    """sup|phi|, sup|grad phi|, eigenvalue range of I + ddbar phi, sup third derivs."""
    grid = phi.grid
    n = grid.n
    sup_phi = float(np.max(np.abs(phi.values.real)))
    grad_sq = np.zeros(grid.shape)
    for a in range(grid.num_axes):
        grad_sq += partial_x(phi, a).values.real ** 2
    sup_grad = float(np.sqrt(np.max(grad_sq)))
    H = hermitian_hessian(phi)
    eye_plus = HermitianMetricField(grid, H + flat_metric(grid).mats)
    lo, hi = eigenvalue_fields(eye_plus)
    sup_third = 0.0
    for j in range(n):
        for k in range(n):
            comp = make_field(grid, H[..., j, k])
            for l in range(n):
                third = partial_z(comp, l)
                sup_third = max(sup_third, third.sup_norm())
    return YauReport(
        sup_phi=sup_phi,
        sup_grad_phi=sup_grad,
        eig_min=float(np.min(lo)),
        eig_max=float(np.max(hi)),
        sup_third=sup_third,
    )


# ---------------------------------------------------------------------------
# continuity method

def _band_limit_warning(F: PeriodicScalarField) -> None:
    spec = np.abs(np.fft.fftn(F.values))
    total = float(np.sum(spec))
    if total == 0.0:
        return
    grid = F.grid
    cutoff = grid.N // 4
    mask = np.zeros(grid.shape, dtype=bool)
    for a in range(grid.num_axes):
        mask |= np.abs(grid.wavenumbers(a)) > cutoff
    high = float(np.sum(spec[mask]))
    if high > 1e-10 * total:
        warnings.warn(
            "F carries significant spectral content above N/4; the solve "
            "continues but may be under-resolved",
            RuntimeWarning,
        )


def _damped_update(
    phi: PeriodicScalarField,
    psi: PeriodicScalarField,
    g: HermitianMetricField,
    floor: float,
) -> PeriodicScalarField | None:
    """Largest dyadic lambda in (0,1] keeping min eig of g~ above the floor."""
    lam = 1.0
    for _ in range(40):
        cand = mean_zero_project(
            make_field(phi.grid, phi.values.real + lam * psi.values.real)
        )
        gt = HermitianMetricField(g.grid, g.mats + hermitian_hessian(cand))
        if positivity_check(gt).min_eig >= floor:
            return cand
        lam *= 0.5
    return None


def _newton_at_t(phi, F, t, g, cfg):
    """Newton iteration at fixed t; returns (phi, iters, residual_sup) or None."""
    for it in range(cfg.newton_max_iter + 1):
        r = ma_residual(phi, F, t, g)
        res_sup = r.sup_norm()
        if res_sup <= cfg.newton_tol:
            return phi, it, res_sup
        if it == cfg.newton_max_iter:
            return None
        rhs = make_field(g.grid, -r.values.real)
        try:
            psi = solve_linearized(rhs, phi, g, cfg)
        except KrylovConvergenceError:
            return None
        phi_next = _damped_update(phi, psi, g, cfg.damping_eig_floor)
        if phi_next is None:
            return None
        phi = phi_next
    return None


def continuity_solve(
    F: PeriodicScalarField,
    g: HermitianMetricField,
    cfg: SolverConfig,
) -> SolveResult:
    """Path-follow t from 0 to 1 with warm-started damped Newton corrections."""
    if not F.is_real:
        raise ValueError("F must be real")
    if F.grid != g.grid:
        raise GridMismatchError("F and g must share a grid")
    rep = positivity_check(g)
    if not rep.is_positive:
        raise NonPositiveMetricError("background metric is not positive")
    _band_limit_warning(F)

    grid = g.grid
    phi = mean_zero_project(make_field(grid, np.zeros(grid.shape)))
    steps: list[ContinuityStep] = []
    t = 0.0
    dt = cfg.t_step_initial
    fast_successes = 0

    def record(t_now, iters, res_sup, phi_now):
        rep = yau_estimate_report(phi_now, g)
        steps.append(
            ContinuityStep(
                t=t_now,
                newton_iters=iters,
                residual_sup=res_sup,
                eig_min=rep.eig_min,
                eig_max=rep.eig_max,
                sup_phi=rep.sup_phi,
                sup_grad_phi=rep.sup_grad_phi,
                sup_third=rep.sup_third,
            )
        )

    while t < 1.0:
        t_try = min(1.0, t + dt)
        outcome = _newton_at_t(phi, F, t_try, g, cfg)
        if outcome is not None:
            phi, iters, res_sup = outcome
            t = t_try
            record(t, iters, res_sup, phi)
            fast_successes = fast_successes + 1 if iters < 5 else 0
            if fast_successes >= 2:
                dt = min(2.0 * dt, 0.25)
                fast_successes = 0
        else:
            dt *= 0.5
            if dt < cfg.t_step_min:
                return SolveResult(
                    phi=phi,
                    trace=ContinuityTrace(steps),
                    converged=False,
                    t_reached=t,
                    message=f"continuity step underflow below {cfg.t_step_min} at t={t}",
                )
    return SolveResult(
        phi=phi,
        trace=ContinuityTrace(steps),
        converged=True,
        t_reached=1.0,
    )
