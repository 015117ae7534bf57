"""
Mod-p bookkeeping around the S^1 and Z/p actions on configuration spaces
E2 grids, a Mayer-Vietoris feasibility audit, the acyclicity and
strict-vs-homotopy comparisons, and integral consistency checks.
"""

import logging
from dataclasses import dataclass, field
from math import factorial, gcd
from typing import Dict, List, Optional, Tuple

from sympy import isprime

from . import cohen_algebra
from .chain_algebra import Coefficients, HomologyResult
from .equivariant_quotient import full_quotient_homology
from .errors import HypothesisError, InvalidInputError, UnsupportedError

logger = logging.getLogger(__name__)

CONFIGURATION = "configuration"
FIXED_POINTS = "fixed_points"

# H^*(C_q(C*)/S^1; F_p): a point for q <= 1, a circle for q = 2
FIXED_POINT_QUOTIENTS: Dict[int, Tuple[int, ...]] = {
    0: (1,),
    1: (1,),
    2: (1, 1),
}


@dataclass(frozen=True)
class E2Grid:
    n: int
    p: int
    space: str
    rows: Tuple[int, ...]
    columns: int

    def entry(self, col: int, row: int) -> int:
        if col % 2 or not 0 <= row < len(self.rows) or not 0 <= col < self.columns:
            return 0
        return self.rows[row]

    def diagonal_sums(self, max_degree: Optional[int] = None) -> Tuple[int, ...]:
        top = self.columns - 1 if max_degree is None else max_degree
        return tuple(
            sum(self.entry(col, total - col) for col in range(total + 1))
            for total in range(top + 1)
        )

    def as_table(self) -> List[List[int]]:
        """Rows top-down the way the grids are usually drawn"""
        return [[self.entry(col, row) for col in range(self.columns)] for row in reversed(range(len(self.rows)))]


@dataclass
class AuditReport:
    name: str
    n: int
    p: int
    passed: bool
    details: Dict = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)


def _check_prime(p: int) -> None:
    if not isprime(p):
        raise InvalidInputError(f"p must be prime, got {p}")


def e2_grid(n: int, p: int, space: str = CONFIGURATION, columns: Optional[int] = None) -> E2Grid:
    _check_prime(p)
    if space == CONFIGURATION:
        rows = cohen_algebra.fiber_dims(n, p)
    elif space == FIXED_POINTS:
        fixed = cohen_algebra.fixed_points(n, p)
        if fixed.empty:
            raise InvalidInputError(f"C_{n}(C) has no Z/{p} fixed points")
        rows = cohen_algebra.cstar_homology(fixed.q, p)
    else:
        raise InvalidInputError(f"Unknown space '{space}' (expected {CONFIGURATION} or {FIXED_POINTS})")
    columns = columns if columns is not None else 2 * len(rows) + 2
    return E2Grid(n, p, space, tuple(rows), columns)


def _tensor_with_bs1(rows: Tuple[int, ...], max_degree: int) -> List[int]:
    return [
        sum(rows[d - 2 * j] for j in range(d // 2 + 1) if d - 2 * j < len(rows))
        for d in range(max_degree + 1)
    ]


def fixed_point_quotient_dims(q: int) -> Tuple[int, ...]:
    if q not in FIXED_POINT_QUOTIENTS:
        raise UnsupportedError(f"H^*(C_{q}(C*)/S^1) is only known here for q <= 2")
    return FIXED_POINT_QUOTIENTS[q]


def monomorphism_rank_check(n: int, p: int, max_degree: Optional[int] = None) -> bool:
    """dim H^i_{S^1}(C_n) <= dim H^i_{S^1}(C_n^{Z/p}) in every degree"""
    fixed = cohen_algebra.fixed_points(n, p)
    if fixed.empty:
        raise HypothesisError(f"n={n} is not 0 or 1 mod {p}")
    max_degree = max_degree if max_degree is not None else 2 * n + 2
    ours = cohen_algebra.equivariant_series(n, p, max_degree).dims
    theirs = _tensor_with_bs1(cohen_algebra.cstar_homology(fixed.q, p), max_degree)
    return all(a <= b for a, b in zip(ours, theirs))


def mayer_vietoris_audit(n: int, p: int, cellular: HomologyResult,
                         max_degree: Optional[int] = None) -> AuditReport:
    """
    Feasibility of the exact sequence
    H^i(X/S^1) -> H^i(X^{Z/p}/S^1) + H^i_{S^1}(X) -> H^i_{S^1}(X^{Z/p}) -> H^{i+1}(X/S^1)
    with X = C_n(C). Ranks follow from exactness one term at a time; the map
    out of H^i_{S^1}(X) is injective, which pins A_{i+1} = D_i - C_i whenever
    both fixed-point quotient terms around it vanish.
    """
    _check_prime(p)
    if cellular.coefficients != Coefficients(p):
        raise InvalidInputError(f"Cellular input must be over F{p}, got {cellular.coefficients.label}")
    fixed = cohen_algebra.fixed_points(n, p)
    if fixed.empty:
        raise HypothesisError(f"n={n} is not 0 or 1 mod {p}; use strict_equals_homotopy_audit")

    quotient = fixed_point_quotient_dims(fixed.q)
    cstar = cohen_algebra.cstar_homology(fixed.q, p)
    if max_degree is None:
        max_degree = max(len(cellular.degrees), len(cstar), len(cohen_algebra.fiber_dims(n, p))) + 4

    a = [cellular.betti(i) for i in range(max_degree + 1)]
    b = [quotient[i] if i < len(quotient) else 0 for i in range(max_degree + 1)]
    c = list(cohen_algebra.equivariant_series(n, p, max_degree).dims)
    d = _tensor_with_bs1(cstar, max_degree)

    terms: List[Tuple[str, int]] = []
    for i in range(max_degree + 1):
        terms.append((f"H^{i}(X/S1)", a[i]))
        terms.append((f"H^{i}(X^Z/{p}/S1)+H^{i}_S1(X)", b[i] + c[i]))
        terms.append((f"H^{i}_S1(X^Z/{p})", d[i]))

    failures: List[str] = []
    ranks: List[int] = []
    previous = 0
    for j, (name, dim) in enumerate(terms):
        rank = dim - previous
        upper = min(dim, terms[j + 1][1]) if j + 1 < len(terms) else dim
        if not 0 <= rank <= upper:
            failures.append(f"segment {j} ({name}): outgoing rank {rank} outside [0, {upper}]")
            break
        if j % 3 == 1 and rank < c[j // 3]:
            failures.append(f"segment {j} ({name}): rank {rank} below dim H^{j // 3}_S1(X) = {c[j // 3]}")
            break
        ranks.append(rank)
        previous = rank

    pinned = {}
    for i in range(max_degree):
        if b[i] == 0 and b[i + 1] == 0:
            pinned[i + 1] = d[i] - c[i]
            if a[i + 1] != d[i] - c[i]:
                failures.append(f"H^{i + 1}(X/S1) = {a[i + 1]} but the sequence forces {d[i] - c[i]}")

    report = AuditReport(
        name="mayer_vietoris",
        n=n,
        p=p,
        passed=not failures,
        details={
            "q": fixed.q,
            "quotient": a,
            "fixed_point_quotient": b,
            "equivariant": c,
            "fixed_point_equivariant": d,
            "ranks": ranks,
            "pinned": pinned,
        },
        failures=failures,
    )
    if failures:
        logger.warning(f"Mayer-Vietoris audit n={n}, p={p} failed: {failures[0]}")
    else:
        logger.info(f"Mayer-Vietoris audit n={n}, p={p} passed")
    return report


def acyclicity_check(p: int, cellular: Optional[Dict[int, HomologyResult]] = None) -> AuditReport:
    """Full quotient is F_p-acyclic for n = p and n = p + 1"""
    _check_prime(p)
    failures = []
    details = {}
    for n in (p, p + 1):
        result = cellular[n] if cellular and n in cellular else full_quotient_homology(n, Coefficients(p))
        fixed = cohen_algebra.fixed_points(n, p)
        max_degree = 2 * n + 2
        ours = list(cohen_algebra.equivariant_series(n, p, max_degree).dims)
        theirs = _tensor_with_bs1(cohen_algebra.cstar_homology(fixed.q, p), max_degree)
        details[n] = {
            "cellular": list(result.betti_numbers),
            "equivariant": ours,
            "fixed_point_equivariant": theirs,
        }
        if not result.is_point():
            failures.append(f"H^*(C_{n}/S1; F{p}) = {list(result.betti_numbers)} is not a point")
        if ours != theirs:
            failures.append(f"equivariant dims of C_{n} and its fixed points differ: {ours} vs {theirs}")
    return AuditReport("acyclicity", p, p, not failures, details, failures)


def strict_equals_homotopy_audit(n: int, p: int, cellular: Optional[HomologyResult] = None) -> AuditReport:
    """Strict quotient and homotopy quotient agree mod p away from fixed points"""
    _check_prime(p)
    if n % p in (0, 1):
        raise HypothesisError(f"n={n} is 0 or 1 mod {p}; the comparison needs fixed-point free Z/{p}")
    if cellular is None:
        cellular = full_quotient_homology(n, Coefficients(p))
    series = cohen_algebra.equivariant_series(n, p)
    top = max(len(series.dims), len(cellular.degrees))
    strict = [cellular.betti(d) for d in range(top)]
    homotopy = [series.dims[d] if d < len(series.dims) else 0 for d in range(top)]
    failures = []
    if strict != homotopy:
        failures.append(f"cellular {strict} differs from coker Delta {homotopy}")
        logger.warning(f"Strict vs homotopy quotient mismatch at n={n}, p={p}: {strict} vs {homotopy}")
    return AuditReport(
        "strict_equals_homotopy", n, p, not failures,
        {"cellular": strict, "coker_delta": homotopy, "branch": series.branch},
        failures,
    )


def torsion_bound_check(n: int, integral: HomologyResult) -> bool:
    """Every torsion coefficient divides n!"""
    if integral.coefficients.is_field:
        raise InvalidInputError("Torsion bound needs integral homology")
    bound = factorial(n)
    offending = [t for t in integral.all_torsion() if bound % t]
    if offending:
        logger.warning(f"Torsion {offending} does not divide {n}!")
    return not offending


def loop_relation_check(n: int, integral: HomologyResult) -> bool:
    """
    H_1 of the full quotient is cyclic on one rotation loop subject to two
    relations of orders n - 1 and n, so it must be trivial.
    """
    if integral.coefficients.is_field:
        raise InvalidInputError("Loop relations need integral homology")
    bound = gcd(n - 1, n)
    order_ok = integral.betti(1) == 0 and all(bound % t == 0 for t in integral.torsion(1))
    if not order_ok:
        logger.warning(f"H_1 of the n={n} quotient is {integral.degrees[1]}, expected order dividing {bound}")
    return order_ok
