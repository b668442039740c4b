"""Statistical kernel: rank correlation, agreement, effect sizes, and location tests.

Everything here is a pure function over small samples. Exact methods
(permutation enumeration for rank correlation, sign-flip enumeration for
the signed-rank test) are used wherever the sample sizes in this project
make them feasible; closed-form approximations are used beyond that and
flagged via ``TestResult.method``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TestResult",
    "EffectSize",
    "WilcoxonResult",
    "RoutedResult",
    "spearman_rho",
    "spearman_rho_ties",
    "spearman_exact_p",
    "cohens_kappa",
    "cohens_d",
    "effect_label",
    "shapiro_wilk",
    "paired_t",
    "wilcoxon_signed_rank",
    "route_significance",
    "mean",
]


@dataclass(frozen=True)
class TestResult:
    """Outcome of a hypothesis test.

    ``method`` is "exact" when the p-value comes from full enumeration of
    the null distribution, "approximate" for a distributional
    approximation, and "degenerate" when the data admit only a trivial
    answer (e.g. constant differences).
    """

    statistic: float
    p_value: float
    method: str
    n: int


@dataclass(frozen=True)
class WilcoxonResult(TestResult):
    """Signed-rank test result; ``p_value`` is two-sided.

    ``p_greater`` is the one-sided p for the alternative "location greater
    than the hypothesized value".
    """

    p_greater: float = 1.0


@dataclass(frozen=True)
class EffectSize:
    """Standardized mean difference with a magnitude label.

    When the pooled standard deviation is zero but the means differ, the
    difference is infinitely many (zero) standard deviations wide; ``d``
    is signed infinity, ``undefined_zero_variance`` is set, and the label
    is "large".
    """

    d: float
    label: str
    undefined_zero_variance: bool = False


@dataclass(frozen=True)
class RoutedResult:
    """Result of the normality-routed location test.

    ``route`` names the test that produced ``result``; ``normality`` is
    the Shapiro-Wilk result on the difference vector, or None when the
    differences were constant and normality is undefined.
    """

    result: TestResult
    route: str
    normality: TestResult | None


_LABEL_THRESHOLDS = ((0.8, "large"), (0.5, "medium"), (0.2, "small"))


def effect_label(d: float) -> str:
    """Magnitude label for |d|: <0.2 none, <0.5 small, <0.8 medium, else large."""
    a = abs(d)
    for cut, name in _LABEL_THRESHOLDS:
        if a >= cut:
            return name
    return "none"


def _as_float_array(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return arr


def _check_permutation(ranks: np.ndarray, name: str) -> None:
    n = len(ranks)
    expected = np.arange(1, n + 1)
    if not np.array_equal(np.sort(ranks), expected):
        if len(np.unique(ranks)) < n:
            raise ValueError(
                f"{name} contains tied ranks; use spearman_rho_ties for tied data"
            )
        raise ValueError(f"{name} is not a permutation of 1..{n}")


def spearman_rho(ranks_a, ranks_b) -> float:
    """Rank correlation of two untied rankings.

    Both inputs must be permutations of 1..n. Computed as
    ``1 - 6 * sum(d_i^2) / (n (n^2 - 1))`` where d_i is the per-item rank
    difference.
    """
    a = _as_float_array(ranks_a, "ranks_a")
    b = _as_float_array(ranks_b, "ranks_b")
    if len(a) != len(b):
        raise ValueError("rank vectors must have equal length")
    n = len(a)
    if n < 2:
        raise ValueError("need at least two ranked items")
    _check_permutation(a, "ranks_a")
    _check_permutation(b, "ranks_b")
    d2 = float(np.sum((a - b) ** 2))
    return 1.0 - 6.0 * d2 / (n * (n * n - 1))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values receiving the mean of their positions."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho_ties(values_a, values_b) -> float:
    """Rank correlation for general (possibly tied) data.

    Product-moment correlation of average ranks; coincides with
    :func:`spearman_rho` when both inputs are untied permutations.
    """
    a = _as_float_array(values_a, "values_a")
    b = _as_float_array(values_b, "values_b")
    if len(a) != len(b):
        raise ValueError("value vectors must have equal length")
    if len(a) < 2:
        raise ValueError("need at least two items")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise ValueError("correlation undefined for a constant input vector")
    ra = _average_ranks(a)
    rb = _average_ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = math.sqrt(float(np.sum(ra * ra)) * float(np.sum(rb * rb)))
    return float(np.sum(ra * rb)) / denom


def spearman_exact_p(rho: float, n: int) -> float:
    """One-sided P(rho* >= rho) under the uniform random-ranking null.

    Exact enumeration over all n! equally likely rankings; limited to
    2 <= n <= 8 to keep enumeration cheap.
    """
    if not 2 <= n <= 8:
        raise ValueError("exact enumeration supported for 2 <= n <= 8 only")
    scale = n * (n * n - 1) / 6.0
    base = np.arange(1, n + 1)
    count = 0
    total = 0
    for perm in itertools.permutations(range(1, n + 1)):
        d2 = int(np.sum((np.asarray(perm) - base) ** 2))
        r = 1.0 - d2 / scale
        if r >= rho - 1e-9:
            count += 1
        total += 1
    return count / total


def cohens_kappa(labels_a, labels_b) -> float | None:
    """Chance-corrected categorical agreement between two label vectors.

    kappa = (p_o - p_e) / (1 - p_e) with p_e the sum of marginal products.
    Returns None when p_e == 1 (both raters constant on the same single
    category), where kappa is undefined.
    """
    a = list(labels_a)
    b = list(labels_b)
    if len(a) != len(b):
        raise ValueError("label vectors must have equal length")
    if not a:
        raise ValueError("label vectors must be non-empty")
    n = len(a)
    categories = sorted(set(a) | set(b), key=str)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    p_e = 0.0
    for cat in categories:
        p_e += (a.count(cat) / n) * (b.count(cat) / n)
    if p_e >= 1.0 - 1e-12:
        return None
    return (p_o - p_e) / (1.0 - p_e)


def cohens_d(sample_a, sample_b) -> EffectSize:
    """Standardized mean difference (first sample minus second).

    Uses the pooled standard deviation with unbiased (n-1) sample
    variances. Zero pooled variance with unequal means yields signed
    infinity with ``undefined_zero_variance`` set.
    """
    a = _as_float_array(sample_a, "sample_a")
    b = _as_float_array(sample_b, "sample_b")
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least two observations")
    na, nb = len(a), len(b)
    diff = float(a.mean() - b.mean())
    var_a = float(a.var(ddof=1))
    var_b = float(b.var(ddof=1))
    pooled = math.sqrt(((na - 1) * var_a + (nb - 1) * var_b) / (na + nb - 2))
    if pooled == 0.0:
        if diff == 0.0:
            return EffectSize(d=0.0, label="none")
        d = math.copysign(math.inf, diff)
        return EffectSize(d=d, label="large", undefined_zero_variance=True)
    d = diff / pooled
    return EffectSize(d=d, label=effect_label(d))


# --- normal distribution helpers -------------------------------------------

def _normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def _normal_quantile(p: float) -> float:
    """Inverse standard normal CDF (Wichura's PPND16 rational approximations)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                    + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
                  + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
                + 1.3314166789178437745e2) * r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                    + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
                  + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
                + 4.2313330701600911252e1) * r + 1.0)
        return q * num / den
    r = p if q < 0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                    + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                  + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
                + 4.63033784615654529590e0) * r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                    + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                  + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                + 2.05319162663775882187e0) * r + 1.0)
    else:
        r -= 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                  + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
                + 5.46378491116411436990e0) * r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                    + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
                  + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
                + 5.99832206555887937690e-1) * r + 1.0)
    val = num / den
    return -val if q < 0 else val


# --- Shapiro-Wilk -----------------------------------------------------------

def shapiro_wilk(sample) -> TestResult:
    """Shapiro-Wilk normality test (Royston's coefficient and p approximations).

    Valid for 3 <= n <= 5000. The W statistic uses the normalized expected
    normal order statistics with Royston's polynomial corrections to the
    two outer weights; the p-value transforms W to an approximately normal
    deviate (distinct transforms for n == 3, 4..11 and >= 12) and reports
    the upper tail.
    """
    x = np.sort(_as_float_array(sample, "sample"))
    n = len(x)
    if n < 3:
        raise ValueError("Shapiro-Wilk requires at least 3 observations")
    if n > 5000:
        raise ValueError("Shapiro-Wilk supported up to n = 5000")
    if x[0] == x[-1]:
        raise ValueError("Shapiro-Wilk undefined for a constant sample")

    m = np.array([_normal_quantile((i - 0.375) / (n + 0.25)) for i in range(1, n + 1)])
    ssq_m = float(np.sum(m * m))
    a = np.zeros(n)
    if n == 3:
        a[0] = -math.sqrt(0.5)
        a[2] = math.sqrt(0.5)
    else:
        u = 1.0 / math.sqrt(n)
        c = m / math.sqrt(ssq_m)
        a_n = (c[-1] + 0.221157 * u - 0.147981 * u**2 - 2.071190 * u**3
               + 4.434685 * u**4 - 2.706056 * u**5)
        if n > 5:
            a_n1 = (c[-2] + 0.042981 * u - 0.293762 * u**2 - 1.752461 * u**3
                    + 5.682633 * u**4 - 3.582633 * u**5)
            phi = (ssq_m - 2 * m[-1] ** 2 - 2 * m[-2] ** 2) / (1 - 2 * a_n**2 - 2 * a_n1**2)
            a[2:-2] = m[2:-2] / math.sqrt(phi)
            a[-1], a[-2] = a_n, a_n1
            a[0], a[1] = -a_n, -a_n1
        else:
            phi = (ssq_m - 2 * m[-1] ** 2) / (1 - 2 * a_n**2)
            a[1:-1] = m[1:-1] / math.sqrt(phi)
            a[-1] = a_n
            a[0] = -a_n
    w_num = float(np.sum(a * x)) ** 2
    w_den = float(np.sum((x - x.mean()) ** 2))
    w = w_num / w_den
    w = min(w, 1.0)

    if n == 3:
        p = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        p = min(max(p, 0.0), 1.0)
    elif n <= 11:
        gamma = -2.273 + 0.459 * n
        g = -math.log(gamma - math.log1p(-w))
        mu = 0.5440 - 0.39978 * n + 0.025054 * n**2 - 0.0006714 * n**3
        sigma = math.exp(1.3822 - 0.77857 * n + 0.062767 * n**2 - 0.0020322 * n**3)
        p = 1.0 - _normal_cdf((g - mu) / sigma)
    else:
        ln_n = math.log(n)
        g = math.log1p(-w)
        mu = -1.5861 - 0.31082 * ln_n - 0.083751 * ln_n**2 + 0.0038915 * ln_n**3
        sigma = math.exp(-0.4803 - 0.082676 * ln_n + 0.0030302 * ln_n**2)
        p = 1.0 - _normal_cdf((g - mu) / sigma)
    return TestResult(statistic=w, p_value=p, method="approximate", n=n)


# --- Student t --------------------------------------------------------------

def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    max_iter = 300
    eps = 3e-14
    fpmin = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise RuntimeError("incomplete beta continued fraction failed to converge")


def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
             + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def _t_sf(t: float, df: float) -> float:
    """Upper-tail probability of Student's t with df degrees of freedom."""
    x = df / (df + t * t)
    p_two = _betainc_reg(df / 2.0, 0.5, x)
    return p_two / 2.0 if t >= 0 else 1.0 - p_two / 2.0


def paired_t(sample_a, sample_b) -> TestResult:
    """Two-sided paired t-test on elementwise differences.

    Constant nonzero differences make the statistic infinite (zero
    variance, nonzero mean); that case is reported with p = 0 and
    method "degenerate". All-zero differences are an error.
    """
    a = _as_float_array(sample_a, "sample_a")
    b = _as_float_array(sample_b, "sample_b")
    if len(a) != len(b):
        raise ValueError("paired samples must have equal length")
    n = len(a)
    if n < 2:
        raise ValueError("paired t-test needs at least two pairs")
    d = a - b
    if np.all(d == 0):
        raise ValueError("zero-differences: samples are identical")
    sd = float(d.std(ddof=1))
    md = float(d.mean())
    if sd == 0.0:
        stat = math.copysign(math.inf, md)
        return TestResult(statistic=stat, p_value=0.0, method="degenerate", n=n)
    t = md / (sd / math.sqrt(n))
    p = 2.0 * _t_sf(abs(t), n - 1)
    return TestResult(statistic=t, p_value=min(p, 1.0), method="approximate", n=n)


# --- Wilcoxon signed rank ---------------------------------------------------

_EXACT_WILCOXON_LIMIT = 25


def _signed_rank_counts(double_ranks: list[int]) -> np.ndarray:
    """Distribution of twice the positive-rank sum over all sign assignments.

    ``double_ranks`` are the (tie-averaged) ranks scaled by 2 so they are
    integers; entry k of the result counts sign vectors with positive-rank
    sum k/2.
    """
    total = sum(double_ranks)
    counts = np.zeros(total + 1, dtype=float)
    counts[0] = 1.0
    for r in double_ranks:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts += shifted
    return counts


def wilcoxon_signed_rank(sample, mu0: float = 3.0) -> WilcoxonResult:
    """One-sample signed-rank test of location against ``mu0``.

    Differences equal to zero are dropped; tied absolute differences get
    average ranks. The statistic is the positive-rank sum. For effective
    n <= 25 the p-values come from the exact (tie-conditional) sign-flip
    distribution; beyond that a tie-corrected normal approximation is
    used. All-zero differences give the degenerate result p = 1.
    """
    x = _as_float_array(sample, "sample")
    if len(x) < 1:
        raise ValueError("sample must be non-empty")
    d = x - mu0
    d = d[d != 0.0]
    n = len(d)
    if n == 0:
        return WilcoxonResult(statistic=0.0, p_value=1.0, method="degenerate",
                              n=0, p_greater=1.0)
    abs_d = np.abs(d)
    ranks = _average_ranks(abs_d)
    w_plus = float(np.sum(ranks[d > 0]))
    total = float(np.sum(ranks))

    if n <= _EXACT_WILCOXON_LIMIT:
        double_ranks = [int(round(2 * r)) for r in ranks]
        counts = _signed_rank_counts(double_ranks)
        denom = counts.sum()
        k = int(round(2 * w_plus))
        p_greater = float(counts[k:].sum() / denom)
        p_lesser = float(counts[: k + 1].sum() / denom)
        p_two = min(1.0, 2.0 * min(p_greater, p_lesser))
        return WilcoxonResult(statistic=w_plus, p_value=p_two, method="exact",
                              n=n, p_greater=p_greater)

    mean_w = total / 2.0
    var_w = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(abs_d, return_counts=True)
    var_w -= float(np.sum(tie_counts**3 - tie_counts)) / 48.0
    sd_w = math.sqrt(var_w)
    z = (w_plus - mean_w) / sd_w
    p_greater = 1.0 - _normal_cdf(z)
    p_two = min(1.0, 2.0 * min(p_greater, _normal_cdf(z)))
    return WilcoxonResult(statistic=w_plus, p_value=p_two, method="approximate",
                          n=n, p_greater=p_greater)


def route_significance(sample_a, sample_b, alpha: float = 0.05) -> RoutedResult:
    """Normality-routed paired location test.

    Shapiro-Wilk on the differences decides the route: p >= alpha uses the
    paired t-test, otherwise the signed-rank test of the differences
    against zero. Constant differences (normality undefined) route to the
    signed-rank test.
    """
    a = _as_float_array(sample_a, "sample_a")
    b = _as_float_array(sample_b, "sample_b")
    if len(a) != len(b):
        raise ValueError("paired samples must have equal length")
    if len(a) < 3:
        raise ValueError("routing requires at least three pairs")
    d = a - b
    if np.all(d == d[0]):
        result = wilcoxon_signed_rank(d, mu0=0.0)
        return RoutedResult(result=result, route="wilcoxon", normality=None)
    normality = shapiro_wilk(d)
    if normality.p_value >= alpha:
        return RoutedResult(result=paired_t(a, b), route="paired_t",
                            normality=normality)
    return RoutedResult(result=wilcoxon_signed_rank(d, mu0=0.0),
                        route="wilcoxon", normality=normality)


def mean(sample) -> float:
    """Arithmetic mean of a non-empty sample."""
    x = _as_float_array(sample, "sample")
    if len(x) == 0:
        raise ValueError("mean of empty sample")
    return float(x.mean())
