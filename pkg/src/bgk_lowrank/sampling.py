"""Greedy interpolation index selection (DEIM)."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class IndexSet:
    """Ordered distinct indices into a flattened grid, in selection order."""

    indices: np.ndarray
    tag: str = ""

    def __post_init__(self):
        arr = np.asarray(self.indices, dtype=int)
        object.__setattr__(self, "indices", arr)
        if arr.ndim != 1:
            raise ValueError("indices must be one-dimensional")
        if len(np.unique(arr)) != arr.size:
            raise ValueError("indices must be distinct")

    def __len__(self):
        return self.indices.size

    def __iter__(self):
        return iter(self.indices)


def deim(M, count=None, tag=""):
    """Greedy index selection from the columns of M.

    The first index is the argmax of |M(:,1)|; each following index is the
    argmax of the residual of the next column after interpolating it at the
    already-selected rows.  Ties break to the smallest index (np.argmax).
    An optional count is reserved for oversampling variants and is rejected
    unless it equals the column count.
    """
    M = np.asarray(M, dtype=float)
    n, r = M.shape
    if r < 1 or n < r:
        raise ValueError(f"need n >= r >= 1, got shape {M.shape}")
    if count is not None and count != r:
        raise ValueError("oversampling is not supported; count must equal r")
    idx = np.empty(r, dtype=int)
    idx[0] = int(np.argmax(np.abs(M[:, 0])))
    for j in range(1, r):
        m = M[:, j]
        sub = M[idx[:j], :j]
        try:
            c = np.linalg.solve(sub, m[idx[:j]])
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                f"singular interpolation matrix at sweep step {j} "
                "(rank-deficient input?)"
            ) from exc
        resid = m - M[:, :j] @ c
        idx[j] = int(np.argmax(np.abs(resid)))
    return IndexSet(idx, tag=tag)


def selection_condition(M, idx):
    """2-norm condition number of M(idx,:); +inf when numerically singular."""
    M = np.asarray(M, dtype=float)
    sel = np.asarray(getattr(idx, "indices", idx), dtype=int)
    if sel.size != M.shape[1]:
        raise ValueError("index count must equal the column count")
    sub = M[sel, :]
    s = np.linalg.svd(sub, compute_uv=False)
    if s[-1] <= s[0] * sub.shape[0] * np.finfo(float).eps:
        return np.inf
    return float(s[0] / s[-1])
