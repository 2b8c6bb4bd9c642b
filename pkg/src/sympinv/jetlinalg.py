"""Small dense linear algebra over generic scalars (numbers or jets).

Used by the frame constructions: entries are series along a submanifold, so
pivoting decisions look only at constant terms.  Callers translate the raised
``_PivotFailure`` into their geometry-specific degeneracy errors.
"""

from __future__ import annotations

from fractions import Fraction


class _PivotFailure(Exception):
    pass


def _const(x):
    if hasattr(x, "value"):
        return x.value()
    return x


def magnitude(x):
    """Float size of the constant part, used to rank pivots."""
    c = _const(x)
    re = getattr(c, "re", c)
    return abs(float(re))


def is_negligible(x, scale=1.0, tol=1e-10):
    c = _const(x)
    if isinstance(c, Fraction) or hasattr(c, "re"):
        re = getattr(c, "re", c)
        return re == 0
    return abs(float(c)) <= tol * max(scale, 1e-30)


def solve(rows, rhs, tol=1e-10):
    """Solve A x = b by Gaussian elimination with constant-term pivoting."""
    n = len(rows)
    a = [list(r) + [v] for r, v in zip(rows, rhs)]
    row_scale = max((magnitude(e) for r in a for e in r), default=1.0)
    for col in range(n):
        piv, piv_mag = None, 0.0
        for r in range(col, n):
            m = magnitude(a[r][col])
            if m > piv_mag:
                piv, piv_mag = r, m
        if piv is None or is_negligible(a[piv][col], row_scale, tol):
            raise _PivotFailure(f"no usable pivot in column {col}")
        a[col], a[piv] = a[piv], a[col]
        pval = a[col][col]
        a[col] = [v / pval for v in a[col]]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def kernel_vector(rows, tol=1e-10):
    """A nonzero kernel vector of a rank-deficient square matrix.

    Intended for matrices of generic corank one (e.g. a skew form restricted
    to an odd-dimensional space).
    """
    n = len(rows)
    a = [list(r) for r in rows]
    scale = max((magnitude(e) for r in a for e in r), default=1.0)
    piv_cols = []
    row = 0
    for col in range(n):
        piv, piv_mag = None, 0.0
        for r in range(row, n):
            m = magnitude(a[r][col])
            if m > piv_mag:
                piv, piv_mag = r, m
        if piv is None or is_negligible(a[piv][col], scale, tol):
            continue
        a[row], a[piv] = a[piv], a[row]
        pval = a[row][col]
        a[row] = [v / pval for v in a[row]]
        for r in range(n):
            if r == row:
                continue
            f = a[r][col]
            a[r] = [v - f * w for v, w in zip(a[r], a[row])]
        piv_cols.append(col)
        row += 1
        if row == n:
            break
    free = [c for c in range(n) if c not in piv_cols]
    if not free:
        raise _PivotFailure("matrix has full rank; no kernel vector")
    f0 = free[0]
    vec = [None] * n
    one = _unit_like(rows)
    zero = one * 0
    for c in range(n):
        vec[c] = one if c == f0 else zero
    for r, c in enumerate(piv_cols):
        vec[c] = -a[r][f0] * one
    return vec


def nullspace_basis(rows, ncols, tol=1e-10):
    """Basis of {v : rows . v = 0} for a short full-rank system of covectors."""
    a = [list(r) for r in rows]
    scale = max((magnitude(e) for r in a for e in r), default=1.0)
    piv_cols = []
    row = 0
    for col in range(ncols):
        piv, piv_mag = None, 0.0
        for r in range(row, len(a)):
            m = magnitude(a[r][col])
            if m > piv_mag:
                piv, piv_mag = r, m
        if piv is None or is_negligible(a[piv][col], scale, tol):
            continue
        a[row], a[piv] = a[piv], a[row]
        pval = a[row][col]
        a[row] = [v / pval for v in a[row]]
        for r in range(len(a)):
            if r != row:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[row])]
        piv_cols.append(col)
        row += 1
        if row == len(a):
            break
    if len(piv_cols) < len(rows):
        raise _PivotFailure("covector system is rank-deficient")
    one = _unit_like(rows)
    zero = one * 0
    basis = []
    for free in range(ncols):
        if free in piv_cols:
            continue
        vec = [zero] * ncols
        vec[free] = one
        for r, c in enumerate(piv_cols):
            vec[c] = -a[r][free] * one
        basis.append(vec)
    return basis


def _unit_like(rows):
    for r in rows:
        for e in r:
            if hasattr(e, "value"):
                from .jets import _const_like  # late import, avoids cycle

                return _const_like(e, _one_scalar(e.value()))
    return 1.0


def _one_scalar(c):
    if isinstance(c, Fraction):
        return Fraction(1)
    if hasattr(c, "re"):
        return c * 0 + 1
    return 1.0
