"""Time steppers: interpolatory projector-splitting (IPS), basis update and
collocate (BUC), and desk-scale references (orthogonal projector-splitting,
augmented BUG, dense RK4)."""

import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from bgk_lowrank import bgk, diagnostics
from bgk_lowrank.lowrank import LowRankState, qr_orthonormalize, svd_truncate
from bgk_lowrank.sampling import deim

DENSE_GUARD = 2**22
CONDITION_ABORT = 1e12


class StepAbortError(RuntimeError):
    """A substep became numerically unusable (singular interpolation matrix,
    non-finite stage, guard violation)."""


@dataclass
class SubstepScheme:
    """Explicit substep integrator: classical RK4 (default) or Euler."""

    tag: str = "rk4"

    def __post_init__(self):
        if self.tag not in ("rk4", "euler"):
            raise ValueError(f"unknown substep scheme {self.tag!r}")


@dataclass
class StepReport:
    step: int = 0
    time: float = 0.0
    rank: int = 0
    mass: float = 0.0
    i_set: object = None
    j_set: object = None
    i_hat: object = None
    j_hat: object = None
    wall_ms: float = 0.0
    trunc_tail: float = 0.0


def _check_finite(Y, label):
    if not np.all(np.isfinite(Y)):
        raise StepAbortError(f"non-finite values in {label}")


def rk4_flow(derivative_oracle, Y0, t0, dt, scheme=None):
    """One explicit step of the substep ODE; Euler mode uses a single call."""
    tag = scheme.tag if scheme is not None else "rk4"
    if tag == "euler":
        k1 = derivative_oracle(t0, Y0)
        _check_finite(k1, "Euler stage")
        return Y0 + dt * k1
    k1 = derivative_oracle(t0, Y0)
    _check_finite(k1, "RK4 stage 1")
    k2 = derivative_oracle(t0 + 0.5 * dt, Y0 + 0.5 * dt * k1)
    _check_finite(k2, "RK4 stage 2")
    k3 = derivative_oracle(t0 + 0.5 * dt, Y0 + 0.5 * dt * k2)
    _check_finite(k3, "RK4 stage 3")
    k4 = derivative_oracle(t0 + dt, Y0 + dt * k3)
    _check_finite(k4, "RK4 stage 4")
    return Y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _orthonormalized(state, seed=0):
    X, S, V = state.X, state.S, state.V
    if not state.x_orthonormal:
        X, R = qr_orthonormalize(X, seed)
        S = R @ S
    if not state.v_orthonormal:
        V, R = qr_orthonormalize(V, seed + 1)
        S = S @ R.T
    return replace(state, X=X, S=S, V=V, x_orthonormal=True, v_orthonormal=True)


def _interp_factor(M, label):
    """LU factorization of an interpolation matrix with a condition guard."""
    s = np.linalg.svd(M, compute_uv=False)
    cond = np.inf if s[-1] == 0 else s[0] / s[-1]
    if cond > CONDITION_ABORT:
        raise StepAbortError(
            f"interpolation matrix {label} is ill-conditioned (cond={cond:.2e})"
        )
    return lu_factor(M)


def _worker_count():
    try:
        return max(1, int(os.environ.get("BGK_THREADS", "2")))
    except ValueError:
        return 2


class IpsStepper:
    """Interpolatory projector-splitting: K, S (backwards), L substeps with
    DEIM index selection; rank is constant."""

    is_dense = False

    def __init__(self, params, scheme=None, seed=0):
        self.params = params
        self.scheme = scheme or SubstepScheme()
        self.seed = seed

    def step(self, state, t, dt):
        p = self.params
        state = _orthonormalized(state, self.seed)
        r = state.rank
        eye = np.eye(r)

        # K-step: V and the column indices are frozen across stages
        V0 = state.V
        J = deim(V0, tag="v")
        lu_v = _interp_factor(V0[J.indices, :], "V(J)")

        def k_deriv(tt, K):
            H = bgk.rhs_cols(LowRankState(K, eye, V0), p, J)
            return lu_solve(lu_v, H.T).T

        K1 = rk4_flow(k_deriv, state.X @ state.S, t, dt, self.scheme)
        X1, R1 = qr_orthonormalize(K1, self.seed)

        # S-step: integrated forward with its minus sign, exactly as written
        I = deim(X1, tag="x")
        lu_x = _interp_factor(X1[I.indices, :], "X(I)")

        def s_deriv(tt, St):
            H = bgk.rhs_block(LowRankState(X1, St, V0), p, I, J)
            return -lu_solve(lu_v, lu_solve(lu_x, H).T).T

        St1 = rk4_flow(s_deriv, R1, t, dt, self.scheme)

        # L-step
        def l_deriv(tt, L):
            H = bgk.rhs_rows(LowRankState(X1, eye, L), p, I)
            return lu_solve(lu_x, H).T

        L1 = rk4_flow(l_deriv, V0 @ St1.T, t, dt, self.scheme)
        V1, Rl = qr_orthonormalize(L1, self.seed)

        new = LowRankState(
            X1, Rl.T, V1, t=t + dt, x_orthonormal=True, v_orthonormal=True
        )
        return new, StepReport(rank=r, i_set=I, j_set=J)


class BucStepper:
    """Basis update and collocate: interpolatory K/L basis updates with
    augmentation, a collocated core step on 2r DEIM indices, then
    rank-adaptive SVD truncation."""

    is_dense = False

    def __init__(self, params, scheme=None, theta=1e-6, r_min=1, r_max=None,
                 parallel=False, seed=0):
        self.params = params
        self.scheme = scheme or SubstepScheme()
        self.theta = theta
        self.r_min = r_min
        self.r_max = r_max
        self.parallel = parallel
        self.seed = seed

    def step(self, state, t, dt):
        p = self.params
        state = _orthonormalized(state, self.seed)
        r = state.rank
        eye = np.eye(r)
        X0, S0, V0 = state.X, state.S, state.V
        N_x, N_v = state.shape
        cap = min(N_x, N_v)

        J = deim(V0, tag="v")
        I = deim(X0, tag="x")
        lu_v = _interp_factor(V0[J.indices, :], "V(J)")
        lu_x = _interp_factor(X0[I.indices, :], "X(I)")

        def k_leg():
            def k_deriv(tt, K):
                H = bgk.rhs_cols(LowRankState(K, eye, V0), p, J)
                return lu_solve(lu_v, H.T).T

            K1 = rk4_flow(k_deriv, X0 @ S0, t, dt, self.scheme)
            aug = np.hstack([K1, X0])
            if aug.shape[1] > cap:
                warnings.warn("augmented basis clipped to the grid size")
                aug = aug[:, :cap]
            Xh, _ = qr_orthonormalize(aug, self.seed)
            return Xh, Xh.T @ X0

        def l_leg():
            def l_deriv(tt, L):
                H = bgk.rhs_rows(LowRankState(X0, eye, L), p, I)
                return lu_solve(lu_x, H).T

            L1 = rk4_flow(l_deriv, V0 @ S0.T, t, dt, self.scheme)
            aug = np.hstack([L1, V0])
            if aug.shape[1] > cap:
                warnings.warn("augmented basis clipped to the grid size")
                aug = aug[:, :cap]
            Vh, _ = qr_orthonormalize(aug, self.seed + 1)
            return Vh, Vh.T @ V0

        if self.parallel and _worker_count() >= 2:
            with ThreadPoolExecutor(max_workers=2) as pool:
                fk = pool.submit(k_leg)
                fl = pool.submit(l_leg)
                Xh, Mh = fk.result()
                Vh, Nh = fl.result()
        else:
            Xh, Mh = k_leg()
            Vh, Nh = l_leg()

        Ih = deim(Xh, tag="x")
        Jh = deim(Vh, tag="v")
        lu_xh = _interp_factor(Xh[Ih.indices, :], "Xhat(Ihat)")
        lu_vh = _interp_factor(Vh[Jh.indices, :], "Vhat(Jhat)")

        def s_deriv(tt, Sh):
            H = bgk.rhs_block(LowRankState(Xh, Sh, Vh), p, Ih, Jh)
            return lu_solve(lu_vh, lu_solve(lu_xh, H).T).T

        Sh1 = rk4_flow(s_deriv, Mh @ S0 @ Nh.T, t, dt, self.scheme)

        r_max = self.r_max if self.r_max is not None else Sh1.shape[0]
        trunc = svd_truncate(Sh1, self.theta, self.r_min, r_max)
        new = LowRankState(
            Xh @ trunc.P,
            np.diag(trunc.sigma),
            Vh @ trunc.Q,
            t=t + dt,
            x_orthonormal=True,
            v_orthonormal=True,
        )
        report = StepReport(
            rank=trunc.rank, i_set=I, j_set=J, i_hat=Ih, j_hat=Jh,
            trunc_tail=trunc.tail,
        )
        return new, report


def _dense_guard(params):
    if params.x_grid.size * params.v_grid.size > DENSE_GUARD:
        raise StepAbortError(
            "problem too large for a dense-h reference integrator "
            f"(N_x*N_v > {DENSE_GUARD})"
        )


class OpsStepper:
    """Orthogonal projector-splitting reference (dense h, small scale only)."""

    is_dense = False

    def __init__(self, params, scheme=None, seed=0):
        _dense_guard(params)
        self.params = params
        self.scheme = scheme or SubstepScheme()
        self.seed = seed

    def step(self, state, t, dt):
        p = self.params
        state = _orthonormalized(state, self.seed)
        V0 = state.V

        def k_deriv(tt, K):
            return bgk.rhs_full(K @ V0.T, p) @ V0

        K1 = rk4_flow(k_deriv, state.X @ state.S, t, dt, self.scheme)
        X1, R1 = qr_orthonormalize(K1, self.seed)

        def s_deriv(tt, S):
            return -X1.T @ bgk.rhs_full((X1 @ S) @ V0.T, p) @ V0

        St1 = rk4_flow(s_deriv, R1, t, dt, self.scheme)

        def l_deriv(tt, L):
            return bgk.rhs_full(X1 @ L.T, p).T @ X1

        L1 = rk4_flow(l_deriv, V0 @ St1.T, t, dt, self.scheme)
        V1, Rl = qr_orthonormalize(L1, self.seed)
        new = LowRankState(
            X1, Rl.T, V1, t=t + dt, x_orthonormal=True, v_orthonormal=True
        )
        return new, StepReport(rank=state.rank)


class BugStepper:
    """Augmented BUG reference: orthogonal basis updates with augmentation,
    Galerkin core step, SVD truncation (dense h, small scale only)."""

    is_dense = False

    def __init__(self, params, scheme=None, theta=1e-6, r_min=1, r_max=None,
                 seed=0):
        _dense_guard(params)
        self.params = params
        self.scheme = scheme or SubstepScheme()
        self.theta = theta
        self.r_min = r_min
        self.r_max = r_max
        self.seed = seed

    def step(self, state, t, dt):
        p = self.params
        state = _orthonormalized(state, self.seed)
        X0, S0, V0 = state.X, state.S, state.V
        cap = min(state.shape)

        def k_deriv(tt, K):
            return bgk.rhs_full(K @ V0.T, p) @ V0

        K1 = rk4_flow(k_deriv, X0 @ S0, t, dt, self.scheme)
        Xh, _ = qr_orthonormalize(np.hstack([K1, X0])[:, :cap], self.seed)
        Mh = Xh.T @ X0

        def l_deriv(tt, L):
            return bgk.rhs_full(X0 @ L.T, p).T @ X0

        L1 = rk4_flow(l_deriv, V0 @ S0.T, t, dt, self.scheme)
        Vh, _ = qr_orthonormalize(np.hstack([L1, V0])[:, :cap], self.seed + 1)
        Nh = Vh.T @ V0

        def s_deriv(tt, Sh):
            return Xh.T @ bgk.rhs_full((Xh @ Sh) @ Vh.T, p) @ Vh

        Sh1 = rk4_flow(s_deriv, Mh @ S0 @ Nh.T, t, dt, self.scheme)

        r_max = self.r_max if self.r_max is not None else Sh1.shape[0]
        trunc = svd_truncate(Sh1, self.theta, self.r_min, r_max)
        new = LowRankState(
            Xh @ trunc.P,
            np.diag(trunc.sigma),
            Vh @ trunc.Q,
            t=t + dt,
            x_orthonormal=True,
            v_orthonormal=True,
        )
        return new, StepReport(rank=trunc.rank, trunc_tail=trunc.tail)


class DenseStepper:
    """Full-matrix RK4 reference (small scale only)."""

    is_dense = True

    def __init__(self, params, scheme=None):
        _dense_guard(params)
        self.params = params
        self.scheme = scheme or SubstepScheme()

    def step(self, f, t, dt):
        f1 = rk4_flow(lambda tt, y: bgk.rhs_full(y, self.params), f, t, dt,
                      self.scheme)
        _check_finite(f1, "dense state")
        return f1, StepReport(rank=min(f.shape))


def state_mass(stepper, state):
    p = stepper.params
    if stepper.is_dense:
        return p.x_grid.weight * p.v_grid.weight * float(np.sum(state))
    return diagnostics.mass(state, p)


def run(stepper, state, t_final, dt, on_step=None, t0=0.0, start_step=0):
    """Drive a stepper from t0 to t_final; returns the final state and all
    StepReports (including a step-0 report for the initial state)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = int(round((t_final - t0) / dt)) if t_final > t0 else 0
    reports = []
    rank = min(state.shape) if stepper.is_dense else state.rank
    rep0 = StepReport(step=start_step, time=t0, rank=rank,
                      mass=state_mass(stepper, state))
    reports.append(rep0)
    if on_step is not None:
        on_step(state, rep0)
    t = t0
    for k in range(1, n_steps + 1):
        tic = time.perf_counter()
        try:
            state, rep = stepper.step(state, t, dt)
        except StepAbortError as exc:
            raise StepAbortError(f"step {start_step + k} aborted: {exc}") from exc
        except (bgk.PositivityError, FloatingPointError,
                np.linalg.LinAlgError) as exc:
            raise StepAbortError(f"step {start_step + k} aborted: {exc}") from exc
        t = t0 + k * dt
        rep.step = start_step + k
        rep.time = t
        rep.mass = state_mass(stepper, state)
        rep.wall_ms = 1000.0 * (time.perf_counter() - tic)
        reports.append(rep)
        if on_step is not None:
            on_step(state, rep)
    return state, reports
