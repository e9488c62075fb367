"""Exact linear algebra over the rationals: fraction-free row echelon form and nullspace bases."""

from fractions import Fraction
from math import lcm
from typing import List, Sequence, Tuple


def integer_rows(rows: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    """Scales each rational row by the lcm of its denominators so every entry is an integer."""
    out = []
    for row in rows:
        den = lcm(*(Fraction(v).denominator for v in row)) if row else 1
        out.append([int(Fraction(v) * den) for v in row])
    return out


def form_fraction_free(m: List[List[int]]) -> Tuple[List[List[int]], List[int]]:
    """
    Bareiss elimination of an integer matrix, in place.

    Returns the nonzero echelon rows and the list of free (non-pivot) columns. Every division is exact because
    the entries after step k are (k+1)x(k+1) minors of the input.
    """
    free_vars = []
    n_rows = len(m)
    if n_rows == 0:
        return [], []
    n_cols = len(m[0])
    piv_r, prev = 0, 1
    for piv_c in range(n_cols):
        if piv_r == n_rows:
            free_vars.append(piv_c)
            continue
        for i_row in range(piv_r, n_rows):
            if m[i_row][piv_c] != 0:
                break
        else:
            free_vars.append(piv_c)
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
        fp = m[piv_r][piv_c]
        for r in range(piv_r + 1, n_rows):
            fr = m[r][piv_c]
            row = m[r]
            for c in range(piv_c + 1, n_cols):
                row[c] = (fp * row[c] - fr * m[piv_r][c]) // prev
            row[piv_c] = 0
        prev = fp
        piv_r += 1
    return m[:piv_r], free_vars


def nullspace(rows: Sequence[Sequence[Fraction]], n_cols: int) -> List[List[Fraction]]:
    """
    Rational basis of {v : rows·v = 0}.

    One basis vector per free column: that column set to 1, the other free columns 0, pivot columns solved by
    back substitution. The result is therefore in echelon form with respect to the free columns.
    """
    if not rows:
        return [[Fraction(int(i == j)) for j in range(n_cols)] for i in range(n_cols)]
    echelon, free_vars = form_fraction_free(integer_rows(rows))
    free_flags = [False] * n_cols
    for c in free_vars:
        free_flags[c] = True
    piv_cols = [c for c, f in enumerate(free_flags) if not f]
    assert len(piv_cols) == len(echelon), f"rank bookkeeping mismatch {len(piv_cols)} != {len(echelon)}"
    basis = []
    for fc in free_vars:
        sol = [Fraction(0)] * n_cols
        sol[fc] = Fraction(1)
        for r in range(len(piv_cols) - 1, -1, -1):
            piv_c = piv_cols[r]
            s = sum((echelon[r][c] * sol[c] for c in range(piv_c + 1, n_cols) if sol[c]), Fraction(0))
            sol[piv_c] = -s / echelon[r][piv_c]
        basis.append(sol)
    return basis


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a rational matrix."""
    if not rows:
        return 0
    echelon, _ = form_fraction_free(integer_rows(rows))
    return len(echelon)
