"""Integer logarithm-branch search shared by the quantum and classical tests.

Both problems have the same shape.  With principal logarithms the times are
``t = base`` and every conjugate pair ``p`` of eigenvalue indices adds a real
column ``coeff[:, p] * M_p`` when its branch integer is ``M_p`` (the partner
index carrying ``-M_p``).  A witness is an integer vector ``M`` with
``base + coeff @ M >= -eps`` on all constrained rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BranchResult:
    m: np.ndarray | None  # witness, one integer per pair
    exhausted: bool  # True when the budget or the mmax clip cut the search short
    nodes: int


def branch_box(base, coeff, rep_rows, partner_rows, eps):
    """Integer box guaranteed to contain every feasible ``M``.

    Row ``rep`` and its partner carry opposite branch columns, so feasibility
    forces ``-base[rep] <= (coeff @ M)[rep] <= base[partner]``.  Inverting the
    square representative block gives an interval for each ``M_p``.

    Returns ``(lo, hi)`` integer arrays, or ``None`` when some interval is
    empty (no branch can work), or ``(None, None)`` if the block is singular.
    """
    base = np.asarray(base, dtype=float)
    lo_y = -base[rep_rows] - eps
    hi_y = base[partner_rows] + eps
    if np.any(hi_y < lo_y):
        return None
    d = coeff[rep_rows]
    if d.shape[0] == 0:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    if np.linalg.matrix_rank(d) < d.shape[1]:
        return None, None
    dinv = np.linalg.inv(d)
    cen = dinv @ (0.5 * (lo_y + hi_y))
    rad = np.abs(dinv) @ (0.5 * (hi_y - lo_y))
    lo = np.ceil(cen - rad - 1e-9).astype(int)
    hi = np.floor(cen + rad + 1e-9).astype(int)
    if np.any(hi < lo):
        return None
    return lo, hi


def search_branches(
    base: np.ndarray,
    coeff: np.ndarray,
    rows: np.ndarray,
    rep_rows: np.ndarray,
    partner_rows: np.ndarray,
    mmax: int,
    budget: int,
    eps: float,
) -> BranchResult:
    """Find the lexicographically smallest feasible branch vector.

    Depth-first over the box from :func:`branch_box`, pruned by the largest
    contribution the remaining columns can still make.  The search is exact
    inside that box; if the box had to be clipped to ``|M| <= mmax`` or the
    node budget ran out before a witness was found, the result is flagged
    ``exhausted``.
    """
    base = np.asarray(base, dtype=float)
    coeff = np.asarray(coeff, dtype=float)
    npair = coeff.shape[1]
    a = base[rows]
    c = coeff[rows]

    box = branch_box(base, coeff, rep_rows, partner_rows, eps)
    if box is None:
        return BranchResult(None, False, 0)
    lo, hi = box
    clipped = False
    if lo is None:
        lo = np.full(npair, -mmax)
        hi = np.full(npair, mmax)
        clipped = True
    else:
        if np.any(lo < -mmax) or np.any(hi > mmax):
            clipped = True
        lo = np.maximum(lo, -mmax)
        hi = np.minimum(hi, mmax)
        if np.any(hi < lo):
            return BranchResult(None, clipped, 0)

    if npair == 0:
        ok = bool(np.all(a >= -eps))
        return BranchResult(np.zeros(0, dtype=int) if ok else None, False, 1)

    nodes = 0
    # most each remaining column can still add to every row
    best = np.maximum(c * lo, c * hi)
    suffix = np.zeros((npair + 1, len(a)))
    suffix[:-1] = np.cumsum(best[:, ::-1], axis=1)[:, ::-1].T
    m = np.zeros(npair, dtype=int)

    def dfs(depth: int, partial: np.ndarray) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _Budget
        if np.any(partial + suffix[depth] < -eps):
            return False
        if depth == npair:
            return True
        for v in range(lo[depth], hi[depth] + 1):
            m[depth] = v
            if dfs(depth + 1, partial + c[:, depth] * v):
                return True
        return False

    try:
        if dfs(0, a.copy()):
            return BranchResult(m.copy(), False, nodes)
    except _Budget:
        return BranchResult(None, True, nodes)
    return BranchResult(None, clipped, nodes)


class _Budget(Exception):
    pass

