"""Descriptive statistics, regression, and the contingency-table battery.

Every test statistic is computed from first principles; tail probabilities
come from the special-function module. Results are returned, never persisted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DomainError, ValidationError
from .special import chi_square_tail, normal_tail_two_sided, t_tail


@dataclass(frozen=True)
class Sample:
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValidationError("sample must contain at least one value")
        if any(not math.isfinite(v) for v in self.values):
            raise ValidationError("sample values must be finite")

    @classmethod
    def of(cls, values: Sequence[float]) -> "Sample":
        return cls(tuple(float(v) for v in values))


@dataclass(frozen=True)
class Table2x2:
    """Counts [[a, b], [c, d]]: row 1 = a,b; row 2 = c,d."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for cell in (self.a, self.b, self.c, self.d):
            if not isinstance(cell, int) or cell < 0:
                raise ValidationError("cell counts must be non-negative integers")
        if self.n < 1:
            raise ValidationError("table total must be at least 1")

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    def margins(self) -> tuple[int, int, int, int]:
        """(row1, row2, col1, col2) totals."""
        return (self.a + self.b, self.c + self.d, self.a + self.c, self.b + self.d)

    def as_rxc(self) -> "TableRxC":
        return TableRxC.of([[self.a, self.b], [self.c, self.d]])


@dataclass(frozen=True)
class TableRxC:
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.counts) < 2 or any(len(row) < 2 for row in self.counts):
            raise ValidationError("table must be at least 2x2")
        widths = {len(row) for row in self.counts}
        if len(widths) != 1:
            raise ValidationError("all rows must have the same length")
        for row in self.counts:
            for cell in row:
                if not isinstance(cell, int) or cell < 0:
                    raise ValidationError("cell counts must be non-negative integers")
        if self.n < 1:
            raise ValidationError("table total must be at least 1")

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "TableRxC":
        return cls(tuple(tuple(int(c) for c in row) for row in rows))

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.counts)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.counts), len(self.counts[0]))


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: Optional[int]
    p_value: Optional[float]
    method: str


def descriptive(sample: Sample) -> dict[str, float]:
    """n, mean, median, sample variance/stdev (n-1), std error, min, max, range."""
    values = sorted(sample.values)
    n = len(values)
    mean = math.fsum(values) / n
    mid = n // 2
    median = values[mid] if n % 2 else (values[mid - 1] + values[mid]) / 2.0
    out = {
        "n": float(n),
        "mean": mean,
        "median": median,
        "min": values[0],
        "max": values[-1],
        "range": values[-1] - values[0],
    }
    if n < 2:
        raise DomainError("variance requires at least two values")
    variance = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    stdev = math.sqrt(variance)
    out["variance"] = variance
    out["stdev"] = stdev
    out["std_error"] = stdev / math.sqrt(n)
    return out


def linear_regression_pearson(
    xs: Sequence[float], ys: Sequence[float]
) -> dict[str, float]:
    """Least-squares line, Pearson r, and the two-sided t test of r.

    t = r * sqrt((n-2) / (1-r^2)); |r| = 1 short-circuits to p = 0 exactly.
    """
    if len(xs) != len(ys):
        raise ValidationError("xs and ys must have equal length")
    n = len(xs)
    if n < 3:
        raise DomainError("regression requires at least three points")
    if any(not math.isfinite(v) for v in list(xs) + list(ys)):
        raise ValidationError("inputs must be finite")
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    sxx = math.fsum((x - mean_x) ** 2 for x in xs)
    syy = math.fsum((y - mean_y) ** 2 for y in ys)
    sxy = math.fsum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    if sxx == 0.0:
        raise DomainError("xs must not all be equal")
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    if syy == 0.0:
        # flat ys: define r = 0 (no linear association measurable)
        r = 0.0
    else:
        r = sxy / math.sqrt(sxx * syy)
        r = max(-1.0, min(1.0, r))
    df = n - 2
    if abs(r) == 1.0:
        t_stat = math.inf if r > 0 else -math.inf
        p = 0.0
    else:
        t_stat = r * math.sqrt(df / (1.0 - r * r))
        p = t_tail(t_stat, df)
    return {
        "slope": slope,
        "intercept": intercept,
        "r": r,
        "t_statistic": t_stat,
        "df": float(df),
        "p_value": p,
    }


def phi_coefficient(t: Table2x2) -> float:
    """(ad - bc) / sqrt((a+b)(c+d)(a+c)(b+d))."""
    r1, r2, c1, c2 = t.margins()
    denom = r1 * r2 * c1 * c2
    if denom == 0:
        raise DomainError("phi undefined for a zero margin")
    return (t.a * t.d - t.b * t.c) / math.sqrt(denom)


def cohens_kappa(t: Table2x2) -> float:
    """(p_o - p_e) / (1 - p_e) with expected agreement from the margins."""
    r1, r2, c1, c2 = t.margins()
    n = t.n
    p_o = (t.a + t.d) / n
    p_e = (r1 * c1 + r2 * c2) / (n * n)
    if p_e == 1.0:
        raise DomainError("kappa undefined when expected agreement is 1")
    return (p_o - p_e) / (1.0 - p_e)


def proportion_difference(t: Table2x2) -> float:
    """Row-proportion difference a/(a+b) - c/(c+d)."""
    r1, r2, _, _ = t.margins()
    if r1 == 0 or r2 == 0:
        raise DomainError("proportion difference undefined for an empty row")
    return t.a / r1 - t.c / r2


def relative_risk(t: Table2x2) -> float:
    r1, r2, _, _ = t.margins()
    if r1 == 0 or r2 == 0 or t.c == 0:
        raise DomainError("relative risk undefined (division by zero)")
    return (t.a / r1) / (t.c / r2)


def odds_ratio(t: Table2x2) -> float:
    if t.b == 0 or t.c == 0:
        raise DomainError("odds ratio undefined (division by zero)")
    return (t.a * t.d) / (t.b * t.c)


def z_correlated_proportions(t: Table2x2) -> TestResult:
    """z = (b - c)/sqrt(b + c), two-sided normal p."""
    if t.b + t.c == 0:
        raise DomainError("z test undefined when both discordant cells are zero")
    z = (t.b - t.c) / math.sqrt(t.b + t.c)
    return TestResult(z, None, normal_tail_two_sided(z), "z_correlated_proportions")


def chi_square_2x2(t: Table2x2, yates: bool = False) -> TestResult:
    """n(ad-bc)^2 / product of margins; Yates replaces |ad-bc| with |ad-bc|-n/2."""
    r1, r2, c1, c2 = t.margins()
    denom = r1 * r2 * c1 * c2
    if denom == 0:
        raise DomainError("chi-square undefined for a zero margin")
    n = t.n
    cross = t.a * t.d - t.b * t.c
    if yates:
        adjusted = max(0.0, abs(cross) - n / 2.0)
        stat = n * adjusted * adjusted / denom
        method = "chi_square_2x2_yates"
    else:
        stat = n * cross * cross / denom
        method = "chi_square_2x2"
    return TestResult(stat, 1, chi_square_tail(stat, 1), method)


def mcnemar(t: Table2x2, yates: bool = False) -> TestResult:
    """(b-c)^2/(b+c); Yates uses (|b-c|-1)^2/(b+c)."""
    disc = t.b + t.c
    if disc == 0:
        raise DomainError("McNemar undefined when both discordant cells are zero")
    if yates:
        stat = max(0.0, abs(t.b - t.c) - 1.0) ** 2 / disc
        method = "mcnemar_yates"
    else:
        stat = (t.b - t.c) ** 2 / disc
        method = "mcnemar"
    return TestResult(stat, 1, chi_square_tail(stat, 1), method)


def concordant_discordant(t: TableRxC) -> tuple[int, int]:
    """Concordant / discordant pair counts over the ordered grid."""
    rows, cols = t.shape
    counts = t.counts
    concordant = 0
    discordant = 0
    for i in range(rows):
        for j in range(cols):
            cell = counts[i][j]
            if cell == 0:
                continue
            below_right = 0
            below_left = 0
            for k in range(i + 1, rows):
                row = counts[k]
                below_right += sum(row[j + 1:])
                below_left += sum(row[:j])
            concordant += cell * below_right
            discordant += cell * below_left
    return concordant, discordant


def gk_gamma(t: TableRxC) -> float:
    """Goodman-Kruskal gamma (C - D)/(C + D)."""
    c, d = concordant_discordant(t)
    if c + d == 0:
        raise DomainError("gamma undefined with no concordant or discordant pairs")
    return (c - d) / (c + d)


def kendall_tau_a(t: TableRxC) -> float:
    """tau-a = (C - D) / (n(n-1)/2); ties count only in the denominator."""
    c, d = concordant_discordant(t)
    n = t.n
    if n < 2:
        raise DomainError("tau-a requires at least two observations")
    return (c - d) / (n * (n - 1) / 2.0)


def kendall_tau_c(t: TableRxC) -> float:
    """tau-c = 2m(C - D) / (n^2 (m-1)), m = min(R, C)."""
    c, d = concordant_discordant(t)
    m = min(t.shape)
    n = t.n
    return 2.0 * m * (c - d) / (n * n * (m - 1))


def chi_square_rxc(t: TableRxC) -> TestResult:
    """Pearson chi-square with margin-derived expecteds; df = (R-1)(C-1)."""
    rows, cols = t.shape
    row_totals = [sum(row) for row in t.counts]
    col_totals = [sum(t.counts[i][j] for i in range(rows)) for j in range(cols)]
    n = t.n
    stat = 0.0
    for i in range(rows):
        for j in range(cols):
            expected = row_totals[i] * col_totals[j] / n
            if expected == 0.0:
                raise DomainError("zero expected cell (empty row or column)")
            diff = t.counts[i][j] - expected
            stat += diff * diff / expected
    df = (rows - 1) * (cols - 1)
    return TestResult(stat, df, chi_square_tail(stat, df), "chi_square_rxc")


def chi_square_gof(
    observed: Sequence[int], expected_proportions: Sequence[float]
) -> TestResult:
    """Goodness of fit: sum (o-e)^2/e against expected proportions; df = k-1."""
    if len(observed) != len(expected_proportions):
        raise ValidationError("observed and expected lengths differ")
    if len(observed) < 2:
        raise ValidationError("goodness of fit requires at least two categories")
    for o in observed:
        if not isinstance(o, int) or o < 0:
            raise ValidationError("observed counts must be non-negative integers")
    if any(p <= 0 for p in expected_proportions):
        raise DomainError("expected proportions must be positive")
    if abs(math.fsum(expected_proportions) - 1.0) > 1e-9:
        raise ValidationError("expected proportions must sum to 1")
    total = sum(observed)
    if total == 0:
        raise DomainError("observed counts are all zero")
    stat = 0.0
    for o, p in zip(observed, expected_proportions):
        e = total * p
        stat += (o - e) ** 2 / e
    df = len(observed) - 1
    return TestResult(stat, df, chi_square_tail(stat, df), "chi_square_gof")
