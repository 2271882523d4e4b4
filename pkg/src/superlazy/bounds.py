"""The bound family f_d / g_d and trace verification against it."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable

from .rewrite import RewriteTrace, TraceSummary, summarize


class BoundVariant(enum.Enum):
    LINEAR = "linear"
    SQUARE = "square"

    def __str__(self) -> str:
        return self.value


VARIANTS = {v.value: v for v in BoundVariant}

CELL_BUDGET = 10**6
BIT_BUDGET = 1 << 20


class BoundTooLarge(ArithmeticError):
    """The bound cannot be evaluated within the resource guard.

    ``by_value`` is set when the value itself is known to need more than the
    bit budget, which makes it larger than any value the guard lets through.
    """

    def __init__(self, message: str, by_value: bool):
        super().__init__(message)
        self.by_value = by_value


def _short(v: int) -> str:
    return str(v) if v.bit_length() <= 64 else f"<{v.bit_length()}-bit number>"


class BoundEvaluator:
    """Memoized evaluation of f_d(n, m).

    ``f_{d+1}(n+1, m)`` feeds a value derived from ``f_{d+1}(n, m)`` into
    both arguments of ``f_d``, so values explode quickly with d.  The guard
    counts memo cells and refuses intermediate values wider than
    ``bit_budget`` bits.
    """

    def __init__(self, variant: BoundVariant = BoundVariant.LINEAR,
                 cell_budget: int = CELL_BUDGET, bit_budget: int = BIT_BUDGET):
        self.variant = variant
        self.cell_budget = cell_budget
        self.bit_budget = bit_budget
        self.memo: dict[tuple[int, int, int], int] = {}
        self.frontier: dict[tuple[int, int], tuple[int, int]] = {}
        self.failed: dict[tuple[int, int], tuple[int, BoundTooLarge]] = {}

    def _feed(self, prev: int, m: int) -> int:
        if self.variant is BoundVariant.SQUARE:
            return 2 * prev * prev
        return (2 * m + 1) * prev

    def f(self, d: int, n: int, m: int) -> int:
        if min(d, n, m) < 0:
            raise ValueError("f is defined on naturals")
        if d == 0 or n == 0:
            return m
        if d == 1 and self.variant is BoundVariant.LINEAR:
            return self._linear_level_one(n, m)
        key = (d, n, m)
        if key in self.memo:
            return self.memo[key]
        # iterate n upwards from the largest cell already known for (d, m),
        # so recursion depth stays bounded by d
        failed = self.failed.get((d, m))
        if failed is not None and n >= failed[0]:
            raise failed[1]
        k, acc = self.frontier.get((d, m), (0, m))
        try:
            acc = self._advance(d, k, n, m, acc)
        except BoundTooLarge as e:
            k_fail = self.frontier.get((d, m), (0, m))[0] + 1
            self.failed[(d, m)] = (k_fail, e)
            raise
        return acc

    def _advance(self, d: int, k: int, n: int, m: int, acc: int) -> int:
        while k < n:
            x = self._feed(acc, m)
            if x.bit_length() > self.bit_budget:
                raise BoundTooLarge(f"argument of f_{d - 1} exceeds {self.bit_budget} bits", True)
            acc = 1 + acc + self.f(d - 1, x, x)
            k += 1
            if acc.bit_length() > self.bit_budget:
                raise BoundTooLarge(f"f_{d}({k}, {_short(m)}) exceeds {self.bit_budget} bits", True)
            if len(self.memo) >= self.cell_budget:
                raise BoundTooLarge(f"memo table exceeds {self.cell_budget} cells", False)
            self.memo[(d, k, m)] = acc
            self.frontier[(d, m)] = (k, acc)
        return acc

    def _linear_level_one(self, n: int, m: int) -> int:
        # f_1(k+1, m) = 1 + (2m+2) f_1(k, m), solved in closed form
        c = 2 * m + 2
        if (n - 1) * (c.bit_length() - 1) > self.bit_budget:
            raise BoundTooLarge(f"f_1({_short(n)}, {_short(m)}) exceeds {self.bit_budget} bits", True)
        p = c**n
        value = p * m + (p - 1) // (c - 1)
        if value.bit_length() > self.bit_budget:
            raise BoundTooLarge(f"f_1({_short(n)}, {_short(m)}) exceeds {self.bit_budget} bits", True)
        return value

    def g(self, d: int, m: int) -> int:
        return self.f(d, m, m)


def f(d: int, n: int, m: int, variant: BoundVariant = BoundVariant.LINEAR) -> int:
    return BoundEvaluator(variant).f(d, n, m)


def g(d: int, m: int, variant: BoundVariant = BoundVariant.LINEAR) -> int:
    return BoundEvaluator(variant).g(d, m)


@dataclass
class MonotonicityReport:
    compared: int = 0
    undecided: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def monotonicity_sweep(d_max: int, n_max: int, m_max: int,
                       variant: BoundVariant = BoundVariant.LINEAR,
                       evaluator: BoundEvaluator | None = None) -> MonotonicityReport:
    """Compare neighbouring cells of the sweep in d, n and m.

    A cell beyond the bit budget is larger than every evaluated cell, so it
    still decides a comparison against one; two such cells, or a cell that
    ran out of memo space, leave the comparison undecided.
    """
    ev = evaluator or BoundEvaluator(variant)
    cells: dict[tuple[int, int, int], int | BoundTooLarge] = {}

    def value(d: int, n: int, m: int) -> int | BoundTooLarge:
        key = (d, n, m)
        if key not in cells:
            try:
                cells[key] = ev.f(d, n, m)
            except BoundTooLarge as e:
                cells[key] = e
        return cells[key]

    rep = MonotonicityReport()
    for d in range(d_max + 1):
        for n in range(n_max + 1):
            for m in range(m_max + 1):
                lo = value(d, n, m)
                for hi_key in ((d + 1, n, m), (d, n + 1, m), (d, n, m + 1)):
                    if any(a > b for a, b in zip(hi_key, (d_max, n_max, m_max))):
                        continue
                    hi = value(*hi_key)
                    verdict = _at_least(hi, lo)
                    if verdict is None:
                        rep.undecided += 1
                        continue
                    rep.compared += 1
                    if not verdict:
                        rep.violations.append(f"f{hi_key} < f{(d, n, m)}")
    return rep


def _at_least(hi: int | BoundTooLarge, lo: int | BoundTooLarge) -> bool | None:
    hi_big = isinstance(hi, BoundTooLarge)
    lo_big = isinstance(lo, BoundTooLarge)
    if not hi_big and not lo_big:
        return hi >= lo
    if hi_big and not lo_big:
        return True if hi.by_value else None
    if lo_big and not hi_big:
        return False if lo.by_value else None
    return None


def monotonicity_check(d_max: int, n_max: int, m_max: int,
                       variant: BoundVariant = BoundVariant.LINEAR) -> bool:
    return monotonicity_sweep(d_max, n_max, m_max, variant).ok


# -- verification -------------------------------------------------------------------


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"

    def __str__(self) -> str:
        return self.value


@dataclass
class BoundReport:
    d: int
    n: int
    m: int
    variant: BoundVariant
    bound: int | None
    observed_steps: int
    observed_max_size: int
    verdict: Verdict
    trace_id: str = ""

    def line(self) -> str:
        value = "TOO-LARGE" if self.bound is None else str(self.bound)
        return (f"bound d={self.d} m={self.m} variant={self.variant} value={value} "
                f"steps={self.observed_steps} maxsize={self.observed_max_size} verdict={self.verdict}")


SURFACE_STRATEGIES = ("surface", "mpostponed", "nsi")


def check_soundness(trace: RewriteTrace | TraceSummary,
                    variant: BoundVariant = BoundVariant.LINEAR,
                    evaluator: BoundEvaluator | None = None,
                    trace_id: str = "") -> BoundReport:
    """Compare a surface trace with g at the depth and size of its initial net."""
    s = summarize(trace) if isinstance(trace, RewriteTrace) else trace
    if s.strategy not in SURFACE_STRATEGIES:
        raise ValueError(f"bound applies to surface reduction, not {s.strategy!r} traces")
    d, m = s.initial.depth, s.initial.size
    ev = evaluator if evaluator is not None and evaluator.variant is variant else BoundEvaluator(variant)
    try:
        bound = ev.g(d, m)
    except BoundTooLarge:
        return BoundReport(d, m, m, variant, None, s.step_count, s.max_size,
                           Verdict.INCONCLUSIVE, trace_id)
    ok = s.step_count <= bound and s.max_size <= bound
    return BoundReport(d, m, m, variant, bound, s.step_count, s.max_size,
                       Verdict.PASS if ok else Verdict.FAIL, trace_id)


@dataclass
class PolynomialReport:
    degree: int | None
    coeff: int
    checked: int
    failures: list[str] = field(default_factory=list)
    worst_ratio: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures


def check_nsi_polynomial(traces: Iterable[RewriteTrace | TraceSummary], degree: int | None,
                         coeff: int) -> PolynomialReport:
    """Empirical check of ``steps, maxsize <= coeff * |G| ** degree``.

    With ``degree=None`` each trace uses one more than the box depth of its
    initial net.
    """
    rep = PolynomialReport(degree, coeff, 0)
    for i, t in enumerate(traces):
        s = summarize(t) if isinstance(t, RewriteTrace) else t
        size = s.initial.size
        k = s.initial.depth + 1 if degree is None else degree
        limit = coeff * size**k
        worst = max(s.step_count, s.max_size)
        rep.checked += 1
        if limit:
            rep.worst_ratio = max(rep.worst_ratio, worst / limit)
        if worst > limit:
            rep.failures.append(f"trace {i}: {worst} > {coeff}*{size}^{k} = {limit}")
    return rep
