"""Exact linear algebra over the scalar field Q(i, sqrt2)."""

from __future__ import annotations

from typing import List, Optional

from .coefficients import Scalar


def solve_linear_poly_system(rows: List[List[Scalar]]) -> Optional[List[Scalar]]:
    """Solve A c = b given rows [a_0, ..., a_{n-1}, b].

    Returns one exact solution (free unknowns set to zero) or None when the
    system is inconsistent.
    """
    if not rows:
        return []
    ncols = len(rows[0]) - 1
    mat = [list(r) for r in rows]
    pivots = []  # (row, col)
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if not mat[i][c].is_zero()), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = mat[r][c].inverse()
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and not mat[i][c].is_zero():
                f = mat[i][c]
                mat[i] = [v - f * w for v, w in zip(mat[i], mat[r])]
        pivots.append((r, c))
        r += 1
        if r == len(mat):
            break
    # inconsistency: zero row with nonzero rhs
    for i in range(r, len(mat)):
        if all(v.is_zero() for v in mat[i][:ncols]) and not mat[i][ncols].is_zero():
            return None
    sol = [Scalar.zero()] * ncols
    for (row, col) in pivots:
        sol[col] = mat[row][ncols]
    return sol
