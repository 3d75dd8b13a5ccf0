"""Strictly positive vectors in the image of a rational matrix.

The decision is a Gordan-type alternative: either some ``u`` has
``M u >= 1`` entrywise, or some nonzero ``y >= 0`` has ``yᵀ M = 0``.
Both are produced by one exact simplex run on ``{u : M u >= 1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .matrix import InvalidInputError, RationalMatrix, Vector, pivot_columns, sign

ZERO = Fraction(0)
ONE = Fraction(1)


class CertificateError(AssertionError):
    """A produced certificate failed exact re-verification."""


@dataclass(frozen=True)
class HerdabilityVerdict:
    herdable: bool
    method: str
    primal_certificate: Vector | None = None
    dual_certificate: Vector | None = None

    def __post_init__(self):
        if self.herdable != (self.primal_certificate is not None):
            raise ValueError("herdable verdicts carry exactly a primal certificate")
        if (self.primal_certificate is None) == (self.dual_certificate is None):
            raise ValueError("exactly one certificate must be present")

    def verify(self, M: RationalMatrix) -> bool:
        """Re-check the certificate against M by exact arithmetic."""
        if self.herdable:
            return check_primal(M, self.primal_certificate)
        return check_dual(M, self.dual_certificate)


def check_primal(M: RationalMatrix, u: Sequence) -> bool:
    if len(u) != M.ncols:
        return False
    return all(x >= 1 for x in M.matvec(u))


def check_dual(M: RationalMatrix, y: Sequence) -> bool:
    if len(y) != M.nrows:
        return False
    return all(x >= 0 for x in y) and any(y) and not any(M.vecmat(y))


def is_unisigned(v: Sequence) -> bool:
    signs = {sign(x) for x in v if x}
    return len(signs) == 1


def _phase_one(M: RationalMatrix):
    """Bland-rule simplex on ``M u+ - M u- - s + a = 1`` minimising ``sum(a)``.

    Returns ``(u, None)`` when the artificial optimum is zero, otherwise
    ``(None, y)`` with ``y`` the optimal phase-one dual values.
    """
    n, d = M.shape
    # columns: u+ (d) | u- (d) | s (n) | a (n)
    ncols = 2 * d + 2 * n
    art0 = 2 * d + n
    tab = []
    for i, r in enumerate(M.rows):
        row = list(r) + [-x for x in r] + [ZERO] * n + [ZERO] * n
        row[2 * d + i] = -ONE
        row[art0 + i] = ONE
        row.append(ONE)
        tab.append(row)
    basis = [art0 + i for i in range(n)]
    # reduced costs of the objective sum(a), expressed in the current basis
    cost = [ZERO] * (ncols + 1)
    for j in range(ncols + 1):
        if not art0 <= j < art0 + n:
            cost[j] = -sum((row[j] for row in tab), ZERO)

    while True:
        enter = next((j for j in range(ncols) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, row in enumerate(tab):
            a = row[enter]
            if a > 0:
                key = (row[-1] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            # the objective is bounded below by zero
            raise AssertionError("phase one cannot be unbounded")
        i = best[1]
        piv_row = tab[i]
        p = piv_row[enter]
        piv_row = [x / p for x in piv_row]
        tab[i] = piv_row
        for k, row in enumerate(tab):
            f = row[enter]
            if k != i and f:
                tab[k] = [x - f * y for x, y in zip(row, piv_row)]
        f = cost[enter]
        cost = [x - f * y for x, y in zip(cost, piv_row)]
        basis[i] = enter

    objective = -cost[-1]
    if objective == 0:
        values = [ZERO] * ncols
        for i, j in enumerate(basis):
            values[j] = tab[i][-1]
        u = tuple(values[j] - values[d + j] for j in range(d))
        return u, None
    # reduced cost of artificial a_i is 1 - y_i
    y = tuple(ONE - cost[art0 + i] for i in range(n))
    return None, y


def strictly_positive_in_image(M: RationalMatrix, method: str = "direct-feasibility") -> HerdabilityVerdict:
    """Decide whether Im(M) contains a strictly positive vector.

    The simplex runs on a column basis of M; the image is unchanged and
    the primal certificate is padded with zeros on the dropped columns.
    """
    if M.nrows == 0:
        raise InvalidInputError("matrix has no rows")
    keep = pivot_columns(M)
    basis_cols = M.submatrix(range(M.nrows), keep) if keep else RationalMatrix.zeros(M.nrows, 0)
    u_small, y = _phase_one(basis_cols)
    if u_small is not None:
        u = [ZERO] * M.ncols
        for j, val in zip(keep, u_small):
            u[j] = val
        verdict = HerdabilityVerdict(True, method, primal_certificate=tuple(u))
    else:
        verdict = HerdabilityVerdict(False, method, dual_certificate=y)
    if not verdict.verify(M):
        raise CertificateError(f"{method} produced a certificate that does not verify")
    return verdict


def unisigned_cover_check(M: RationalMatrix) -> Vector | None:
    """Coefficients combining unisigned columns into a strictly positive vector.

    Uses every unisigned column, each scaled so that its nonzero entries
    are at least 1 in absolute value and positive; succeeds when those
    columns cover every row.  Sufficient, not necessary.
    """
    coeffs = [ZERO] * M.ncols
    covered = set()
    for j, col in enumerate(M.columns()):
        if is_unisigned(col):
            nz = [x for x in col if x]
            smallest = min(abs(x) for x in nz)
            coeffs[j] = sign(nz[0]) / smallest
            covered.update(i for i, x in enumerate(col) if x)
    if len(covered) < M.nrows:
        return None
    return tuple(coeffs)


def _check_tiling(parts: Sequence[range], size: int, what: str):
    pos = 0
    for r in parts:
        if r.start != pos or r.stop < r.start or r.step != 1:
            raise InvalidInputError(f"{what} partition does not tile [0, {size})")
        pos = r.stop
    if pos != size:
        raise InvalidInputError(f"{what} partition does not tile [0, {size})")


def block_triangular_positive(
    M: RationalMatrix, row_partition: Sequence[range], col_partition: Sequence[range]
) -> Vector | None:
    """Witness ``u`` with ``M u >> 0`` for a block upper-triangular M.

    Each diagonal block must have a strictly positive vector in its image.
    Blocks are solved bottom-up; the coefficient of each block is scaled
    until the rows it owns dominate what the blocks below contribute.
    """
    row_partition = [range(r.start, r.stop) for r in row_partition]
    col_partition = [range(c.start, c.stop) for c in col_partition]
    if len(row_partition) != len(col_partition):
        raise InvalidInputError("row and column partitions differ in length")
    _check_tiling(row_partition, M.nrows, "row")
    _check_tiling(col_partition, M.ncols, "column")
    k = len(row_partition)
    for p in range(k):
        for q in range(p):
            if not M.submatrix(row_partition[p], col_partition[q]).is_zero():
                raise InvalidInputError(f"block ({p},{q}) below the diagonal is nonzero")

    local = []
    for p in range(k):
        rows, cols = row_partition[p], col_partition[p]
        if len(rows) == 0:
            local.append(tuple(ZERO for _ in cols))
            continue
        if len(cols) == 0:
            return None
        v = strictly_positive_in_image(M.submatrix(rows, cols))
        if not v.herdable:
            return None
        local.append(v.primal_certificate)

    u = [ZERO] * M.ncols
    for p in reversed(range(k)):
        rows, cols = row_partition[p], col_partition[p]
        for j, val in zip(cols, local[p]):
            u[j] = val
        if len(rows) == 0:
            continue
        # rows of block p see their own block (>= 1 per unit of scale) plus
        # the already fixed lower blocks' columns to the right
        tail = M.matvec(u)
        own = M.submatrix(rows, cols).matvec(local[p])
        scale = ONE
        for idx, i in enumerate(rows):
            rest = tail[i] - own[idx]
            need = (ONE - rest) / own[idx]
            if need > scale:
                scale = need
        for j, val in zip(cols, local[p]):
            u[j] = val * scale
    result = tuple(u)
    if not all(x > 0 for x in M.matvec(result)):
        raise CertificateError("block-triangular witness is not strictly positive")
    return result
