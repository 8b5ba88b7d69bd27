"""Exact linear programming over the rationals.

Primal simplex with Bland's anti-cycling rule in two phases.  All pivots
are exact; the reported optimum and attaining point are therefore exact
rationals.  Free variables are handled by the usual positive/negative
split, so callers state constraints directly over signed variables.

If gmpy2 is installed its ``mpq`` type is used for the tableau (it is
arithmetic-compatible with ``Fraction`` but considerably faster); results
are converted back to ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - gmpy2 is normally present
    _mpq = Fraction

__all__ = [
    "LinProgram",
    "LpOptimal",
    "LpInfeasible",
    "LpUnbounded",
    "lp_solve",
]

LEQ = "<="
EQ = "="


def _q(v):
    return _mpq(int(v.numerator), int(v.denominator))


def _to_fraction(v) -> Fraction:
    # Plain-int internals: Fraction(mpq) carries mpz parts, which mpq()
    # itself then refuses to convert back.
    return Fraction(int(v.numerator), int(v.denominator))


@dataclass
class LinProgram:
    """min/max of a linear objective over {x : A x (<=|=) b}.

    Variables are free (unbounded in sign); add explicit box rows to
    bound them.  Every constraint row must carry exactly ``num_vars``
    coefficients.
    """

    num_vars: int
    constraints: list[tuple[list[Fraction], str, Fraction]] = field(default_factory=list)
    objective: list[Fraction] = field(default_factory=list)
    maximize: bool = False

    def add_constraint(self, coeffs: Sequence, relation: str, rhs) -> None:
        if len(coeffs) != self.num_vars:
            raise ValueError(
                f"constraint has {len(coeffs)} coefficients, expected {self.num_vars}"
            )
        if relation not in (LEQ, EQ):
            raise ValueError(f"unknown relation {relation!r}")
        self.constraints.append(
            ([Fraction(c) for c in coeffs], relation, Fraction(rhs))
        )

    def validate(self) -> None:
        if self.num_vars < 1:
            raise ValueError("LinProgram needs at least one variable")
        if len(self.objective) != self.num_vars:
            raise ValueError("objective length does not match variable count")
        for coeffs, rel, _ in self.constraints:
            if len(coeffs) != self.num_vars:
                raise ValueError("constraint row width does not match variable count")
            if rel not in (LEQ, EQ):
                raise ValueError(f"unknown relation {rel!r}")


@dataclass(frozen=True)
class LpOptimal:
    value: Fraction
    point: tuple[Fraction, ...]


class LpInfeasible:
    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "LpInfeasible()"

    def __eq__(self, other) -> bool:
        return isinstance(other, LpInfeasible)

    def __hash__(self) -> int:
        return hash("LpInfeasible")


class LpUnbounded:
    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "LpUnbounded()"

    def __eq__(self, other) -> bool:
        return isinstance(other, LpUnbounded)

    def __hash__(self) -> int:
        return hash("LpUnbounded")


def _pivot(tab, basis, row, col) -> None:
    """Row-reduce the tableau about (row, col) and update the basis."""
    piv = tab[row][col]
    inv = 1 / piv
    prow = tab[row]
    for j in range(len(prow)):
        prow[j] *= inv
    for i in range(len(tab)):
        if i == row:
            continue
        f = tab[i][col]
        if f:
            r = tab[i]
            for j in range(len(r)):
                r[j] -= f * prow[j]
    basis[row] = col


def _simplex_phase(tab, basis, ncols) -> str:
    """Run Bland-rule simplex on a canonical tableau.

    ``tab`` rows: constraint rows then the objective row (reduced costs,
    minimization).  Returns "optimal" or "unbounded".
    """
    m = len(tab) - 1
    obj = tab[m]
    while True:
        col = -1
        for j in range(ncols):
            if obj[j] < 0:
                col = j
                break
        if col < 0:
            return "optimal"
        row = -1
        best = None
        for i in range(m):
            a = tab[i][col]
            if a > 0:
                ratio = tab[i][ncols] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    best = ratio
                    row = i
        if row < 0:
            return "unbounded"
        _pivot(tab, basis, row, col)


def lp_solve(prog: LinProgram):
    """Exact optimum of ``prog``.

    Returns LpOptimal(value, point) with a feasible point attaining the
    value, or LpInfeasible / LpUnbounded.
    """
    prog.validate()
    n = prog.num_vars
    rows = prog.constraints
    m = len(rows)
    sense = -1 if prog.maximize else 1  # minimize sense * objective

    # Free variables split: x_k = p_k - q_k, columns 2k, 2k+1.
    nslack = sum(1 for _, rel, _ in rows if rel == LEQ)
    base_cols = 2 * n + nslack
    Z = _mpq(0)
    ONE = _mpq(1)

    A = [[Z] * base_cols for _ in range(m)]
    b = [Z] * m
    si = 0
    for i, (coeffs, rel, rhs) in enumerate(rows):
        for k, c in enumerate(coeffs):
            if c:
                q = _q(c)
                A[i][2 * k] = q
                A[i][2 * k + 1] = -q
        b[i] = _q(rhs)
        if rel == LEQ:
            A[i][2 * n + si] = ONE
            si += 1
    # Normalize to b >= 0.
    for i in range(m):
        if b[i] < 0:
            b[i] = -b[i]
            A[i] = [-a for a in A[i]]

    # Choose an initial basis: slack columns where usable, else artificials.
    basis = [-1] * m
    art_cols: list[int] = []
    for i in range(m):
        for j in range(2 * n, base_cols):
            if A[i][j] == 1 and all(A[k][j] == 0 for k in range(m) if k != i):
                basis[i] = j
                break
    n_art = sum(1 for x in basis if x < 0)
    ncols = base_cols + n_art
    tab = []
    ai = 0
    for i in range(m):
        row = A[i] + [Z] * n_art + [b[i]]
        if basis[i] < 0:
            row[base_cols + ai] = ONE
            basis[i] = base_cols + ai
            art_cols.append(base_cols + ai)
            ai += 1
        tab.append(row)

    if n_art:
        # Phase 1: minimize the sum of artificial variables.
        obj = [Z] * (ncols + 1)
        for j in art_cols:
            obj[j] = ONE
        tab.append(obj)
        for i in range(m):
            if basis[i] in art_cols:
                r = tab[i]
                o = tab[m]
                for j in range(ncols + 1):
                    o[j] -= r[j]
        status = _simplex_phase(tab, basis, ncols)
        assert status == "optimal"  # phase-1 objective is bounded below by 0
        if tab[m][ncols] < 0:
            return LpInfeasible()
        tab.pop()
        # Pivot remaining artificials out of the basis, dropping redundant rows.
        drop = []
        for i in range(m):
            if basis[i] in art_cols:
                col = next(
                    (j for j in range(base_cols) if tab[i][j] != 0),
                    -1,
                )
                if col < 0:
                    drop.append(i)
                else:
                    _pivot(tab, basis, i, col)
        for i in reversed(drop):
            tab.pop(i)
            basis.pop(i)
        m = len(tab)
        for row in tab:
            del row[base_cols:ncols]
        ncols = base_cols

    # Phase 2.
    obj = [Z] * (ncols + 1)
    for k, c in enumerate(prog.objective):
        if c:
            q = _q(sense * c)
            obj[2 * k] += q
            obj[2 * k + 1] -= q
    tab.append(obj)
    for i in range(m):
        cb = tab[m][basis[i]]
        if cb:
            r = tab[i]
            o = tab[m]
            for j in range(ncols + 1):
                o[j] -= cb * r[j]
    status = _simplex_phase(tab, basis, ncols)
    if status == "unbounded":
        return LpUnbounded()

    x = [Z] * ncols
    for i in range(m):
        x[basis[i]] = tab[i][ncols]
    point = tuple(
        _to_fraction(x[2 * k] - x[2 * k + 1]) for k in range(n)
    )
    value = _to_fraction(sense * -tab[m][ncols])
    return LpOptimal(value=value, point=point)
