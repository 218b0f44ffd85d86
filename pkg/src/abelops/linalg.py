"""Exact linear algebra over the rationals.

Plain Gaussian elimination with deterministic first-nonzero pivoting; the
rational backend keeps everything exact, so no pivot-growth tricks are
needed.  Rows are lists of rationals and are never modified in place by the
public functions.
"""

from __future__ import annotations

from ._rat import QQ, Q0, Q1


def _rref(rows: list[list], width: int):
    """Reduced row echelon form; returns (matrix, pivot column list)."""
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(width):
        pivot_row = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = Q1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def rank(rows: list[list]) -> int:
    if not rows:
        return 0
    _, pivots = _rref(rows, len(rows[0]))
    return len(pivots)


def nullspace(rows: list[list], width: int) -> list[list]:
    """Basis of the right nullspace, deterministic order, one vector per
    free column with that free coordinate set to 1."""
    mat, pivots = _rref(rows, width) if rows else ([], [])
    pivot_set = set(pivots)
    free = [c for c in range(width) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = [Q0] * width
        vec[fc] = Q1
        for r, pc in enumerate(pivots):
            vec[pc] = -mat[r][fc]
        basis.append(vec)
    return basis


def solve_affine(rows: list[list], rhs: list):
    """Solve A x = b exactly.

    Returns (particular_solution, nullspace_basis) or None when the system
    is inconsistent.  The particular solution sets all free variables to 0,
    which is the canonical representative used everywhere in this package.
    """
    if not rows:
        return ([], [])
    width = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    mat, pivots = _rref(aug, width)
    for row in mat:
        if not any(row[:width]) and row[width]:
            return None
    sol = [Q0] * width
    for r, pc in enumerate(pivots):
        sol[pc] = mat[r][width]
    return sol, nullspace([r[:width] for r in mat if any(r[:width])], width)


def solve_unique(rows: list[list], rhs: list):
    """Solve expecting a unique solution; returns (solution, nullity)."""
    res = solve_affine(rows, rhs)
    if res is None:
        return None, None
    sol, null = res
    return sol, len(null)


def solve_multi(rows: list[list], rhs_list: list[list]):
    """Solve A x = b for several right-hand sides with one elimination.

    Returns (solutions, nullspace_basis) where solutions[i] is the canonical
    particular solution (free variables zero) for rhs_list[i], or None when
    that right-hand side is inconsistent.
    """
    if not rows:
        return [[] for _ in rhs_list], []
    width = len(rows[0])
    nrhs = len(rhs_list)
    aug = [list(r) + [b[i] for b in rhs_list] for i, r in enumerate(rows)]
    mat, pivots = _rref(aug, width)
    null = nullspace([r[:width] for r in mat if any(r[:width])], width)
    solutions = []
    for j in range(nrhs):
        bad = any(not any(row[:width]) and row[width + j] for row in mat)
        if bad:
            solutions.append(None)
            continue
        sol = [Q0] * width
        for r, pc in enumerate(pivots):
            sol[pc] = mat[r][width + j]
        solutions.append(sol)
    return solutions, null
