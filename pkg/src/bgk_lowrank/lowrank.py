"""Factored states f = X S V^T and their linear-algebra services."""

from dataclasses import dataclass, replace

import numpy as np

_ORTH_TOL = 1e-10


@dataclass(frozen=True)
class LowRankState:
    """Rank-r factorization X (N_x x r), S (r x r), V (N_v x r)."""

    X: np.ndarray
    S: np.ndarray
    V: np.ndarray
    t: float = 0.0
    x_orthonormal: bool = False
    v_orthonormal: bool = False
    tolerance_met: bool = True

    def __post_init__(self):
        r = self.S.shape[0]
        if self.S.shape != (r, r):
            raise ValueError("core matrix must be square")
        if self.X.shape[1] != r or self.V.shape[1] != r:
            raise ValueError("factor column counts must match the core size")
        if r < 1 or r > min(self.X.shape[0], self.V.shape[0]):
            raise ValueError(f"rank {r} out of range")

    @property
    def rank(self):
        return self.S.shape[0]

    @property
    def shape(self):
        return (self.X.shape[0], self.V.shape[0])

    def with_time(self, t):
        return replace(self, t=t)


def _completion_direction(Q, filled, rng):
    """Seeded random unit vector orthogonal to the first `filled` columns of Q."""
    n = Q.shape[0]
    for _ in range(100):
        q = rng.standard_normal(n)
        for _ in range(2):
            q -= Q[:, :filled] @ (Q[:, :filled].T @ q)
        nrm = np.linalg.norm(q)
        if nrm > 1e-8 * np.sqrt(n):
            return q / nrm
    raise np.linalg.LinAlgError("could not complete an orthonormal direction")


def _mgs_with_completion(A, seed):
    """Modified Gram-Schmidt with reorthogonalization; rank-deficient columns
    are replaced by seeded random orthonormal directions and get zero R rows."""
    n, k = A.shape
    Q = np.zeros((n, k))
    R = np.zeros((k, k))
    rng = np.random.default_rng(seed)
    drop_tol = 1e-13 * max(np.linalg.norm(A), 1e-300)
    for j in range(k):
        q = A[:, j].copy()
        for _ in range(2):
            proj = Q[:, :j].T @ q
            R[:j, j] += proj
            q -= Q[:, :j] @ proj
        nrm = np.linalg.norm(q)
        if nrm > drop_tol:
            Q[:, j] = q / nrm
            R[j, j] = nrm
        else:
            R[:j, j] += Q[:, :j].T @ q  # fold the tiny residue back
            R[j, j] = 0.0
            Q[:, j] = _completion_direction(Q, j, rng)
    return Q, R


def qr_orthonormalize(A, seed=0):
    """Economic QR with deterministic completion of rank-deficient columns."""
    A = np.asarray(A, dtype=float)
    n, k = A.shape
    if n < k:
        raise ValueError(f"need at least as many rows as columns, got {A.shape}")
    Q, R = np.linalg.qr(A)
    diag = np.abs(np.diag(R))
    if diag.min() > 1e-12 * max(diag.max(), 1e-300):
        return Q, R
    return _mgs_with_completion(A, seed)


@dataclass(frozen=True)
class TruncatedSVD:
    P: np.ndarray
    sigma: np.ndarray
    Q: np.ndarray
    rank: int
    tail: float


def svd_truncate(S_hat, theta, r_min, r_max):
    """Truncate singular values with relative Frobenius-tail tolerance theta.

    Returns the smallest rank r1 in [r_min, min(r_max, m)] such that
    sqrt(sum_{i>r1} sigma_i^2) <= theta * sqrt(sum_i sigma_i^2), or the cap
    if no rank satisfies the tolerance.
    """
    S_hat = np.asarray(S_hat, dtype=float)
    if not np.all(np.isfinite(S_hat)):
        raise ValueError("non-finite entries in core matrix")
    if r_min < 1 or r_max < r_min or theta < 0:
        raise ValueError("invalid truncation parameters")
    m = S_hat.shape[0]
    P, s, Qt = np.linalg.svd(S_hat)
    total = float(np.sqrt(np.sum(s**2)))
    # tails[r] = sqrt(sum_{i >= r} sigma_i^2)
    tails = np.sqrt(np.concatenate([np.cumsum((s**2)[::-1])[::-1], [0.0]]))
    cap = min(r_max, m)
    r1 = cap
    for r in range(max(r_min, 1), cap + 1):
        if tails[r] <= theta * total:
            r1 = r
            break
    return TruncatedSVD(P[:, :r1], s[:r1], Qt[:r1, :].T, r1, float(tails[r1]))


def _as_indices(idx):
    if idx is None:
        return None
    arr = np.asarray(getattr(idx, "indices", idx), dtype=int)
    return arr


def evaluate(state, rows=None, cols=None):
    """Dense block X(rows,:) S V(cols,:)^T; None selects all rows/columns."""
    rows = _as_indices(rows)
    cols = _as_indices(cols)
    for arr, n in ((rows, state.X.shape[0]), (cols, state.V.shape[0])):
        if arr is not None and (arr.min(initial=0) < 0 or arr.max(initial=0) >= n):
            raise IndexError("index out of range")
    Xr = state.X if rows is None else state.X[rows, :]
    Vc = state.V if cols is None else state.V[cols, :]
    return (Xr @ state.S) @ Vc.T


def cross_compress(entry_oracle, N_x, N_v, tol, r_max, seed=0):
    """Adaptive cross approximation with partial pivoting.

    entry_oracle(i, j) must accept broadcastable integer arrays and return
    the corresponding matrix entries.  The residual Frobenius norm is
    estimated incrementally from the rank-1 cross terms; iteration stops when
    the latest term falls below tol times the estimated norm, or at r_max.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rng = np.random.default_rng(seed)
    all_cols = np.arange(N_v)
    all_rows = np.arange(N_x)
    us, vs = [], []
    rows_used, cols_used = [], []
    fro2 = 0.0
    met = False

    def row_residual(i):
        r = np.asarray(entry_oracle(i, all_cols), dtype=float)
        for u, v in zip(us, vs):
            r = r - u[i] * v
        return r

    def col_residual(j):
        c = np.asarray(entry_oracle(all_rows, j), dtype=float)
        for u, v in zip(us, vs):
            c = c - v[j] * u
        return c

    n_probe = min(N_x, 8)
    candidates = list(rng.choice(N_x, size=n_probe, replace=False))
    i_star = candidates.pop(0)
    while len(us) < r_max:
        r_row = row_residual(i_star)
        if cols_used:
            r_row[np.asarray(cols_used)] = 0.0
        j_star = int(np.argmax(np.abs(r_row)))
        if abs(r_row[j_star]) <= 1e-300 or not np.isfinite(r_row[j_star]):
            nxt = [i for i in candidates if i not in rows_used]
            if not nxt:
                met = True
                break
            i_star = nxt.pop(0)
            candidates = nxt
            continue
        c_col = col_residual(j_star)
        pivot = c_col[i_star]
        u = c_col / pivot
        v = r_row
        for up, vp in zip(us, vs):
            fro2 += 2.0 * (up @ u) * (vp @ v)
        nu2, nv2 = float(u @ u), float(v @ v)
        fro2 += nu2 * nv2
        us.append(u)
        vs.append(v)
        rows_used.append(i_star)
        cols_used.append(j_star)
        if np.sqrt(nu2 * nv2) <= tol * np.sqrt(max(fro2, 1e-300)):
            met = True
            break
        masked = np.abs(c_col)
        masked[np.asarray(rows_used)] = -1.0
        i_star = int(np.argmax(masked))

    if not us:
        raise ValueError("cross approximation found no nonzero pivot")
    U = np.stack(us, axis=1)
    W = np.stack(vs, axis=1)
    Qu, Ru = qr_orthonormalize(U, seed=seed)
    Qv, Rv = qr_orthonormalize(W, seed=seed + 1)
    trunc = svd_truncate(Ru @ Rv.T, 1e-15, 1, len(us))
    return LowRankState(
        X=Qu @ trunc.P,
        S=np.diag(trunc.sigma),
        V=Qv @ trunc.Q,
        x_orthonormal=True,
        v_orthonormal=True,
        tolerance_met=met,
    )


def pad_rank(state, r_target, seed):
    """Extend to rank r_target with seeded random orthonormal columns and a
    zero-padded core; evaluate() is unchanged."""
    r = state.rank
    if r_target < r:
        raise ValueError("target rank below current rank")
    if r_target > min(state.X.shape[0], state.V.shape[0]):
        raise ValueError("target rank exceeds grid sizes")
    if r_target == r:
        return _verify_orthonormal(state)
    rng = np.random.default_rng(seed)
    X = _extend_columns(state.X, r_target, rng)
    V = _extend_columns(state.V, r_target, rng)
    S = np.zeros((r_target, r_target))
    S[:r, :r] = state.S
    return replace(state, X=X, S=S, V=V)


def _extend_columns(M, r_target, rng):
    n, r = M.shape
    out = np.zeros((n, r_target))
    out[:, :r] = M
    for j in range(r, r_target):
        out[:, j] = _completion_direction(out, j, rng)
    return out


def _verify_orthonormal(state):
    for M, flag in ((state.X, "x"), (state.V, "v")):
        g = M.T @ M - np.eye(M.shape[1])
        if np.abs(g).max() > _ORTH_TOL:
            raise ValueError(f"{flag}-factor is not orthonormal")
    return replace(state, x_orthonormal=True, v_orthonormal=True)
