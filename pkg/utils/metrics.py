"""
@file metrics.py

Goodness-of-fit machinery comparing Monte Carlo sojourn samples against mixed laws:
one- and two-sample Kolmogorov-Smirnov tests on the continuous parts, Wilson score and
two-proportion intervals for the atoms, and sample means with standard errors.
"""
import numpy as np
import scipy.stats

from dataclasses import dataclass, field
from typing import Tuple
from utils.exceptions import DomainError


@dataclass(frozen=True)
class EmpiricalLaw:
    """ Sorted continuous-part samples, count of structural atom events and total sample size """
    continuous_samples: np.ndarray
    atom_count: int
    n_total: int
    atom_location: float = float("nan")

    def __post_init__(self):
        if self.atom_count + len(self.continuous_samples) != self.n_total:
            raise DomainError(f"EmpiricalLaw counts do not add up: {self.atom_count} atoms + "
                              f"{len(self.continuous_samples)} samples != {self.n_total}")

    @classmethod
    def from_occupation(cls, gamma, atom_event, atom_location=float("nan")):
        """
        Splits raw campaign output into continuous samples and atom events
        :param gamma: occupation times, one per path
        :param atom_event: boolean flags of the structural atom event, one per path
        """
        gamma = np.asarray(gamma, dtype=float)
        atom_event = np.asarray(atom_event, dtype=bool)
        return cls(np.sort(gamma[~atom_event]), int(atom_event.sum()), int(gamma.size), float(atom_location))

    @property
    def atom_freq(self):
        return self.atom_count / self.n_total if self.n_total else float("nan")

    def all_samples(self):
        """ Continuous samples with the atom events placed at the atom location """
        return np.concatenate([self.continuous_samples, np.full(self.atom_count, self.atom_location)])


@dataclass(frozen=True)
class GofReport:
    ks_stat: float
    ks_critical: float
    atom_freq: float
    atom_ci: Tuple[float, float]
    passed: bool
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        """ JSON form with exactly the report fields """
        return {
            "ks_stat": float(self.ks_stat),
            "ks_critical": float(self.ks_critical),
            "atom_freq": float(self.atom_freq),
            "atom_ci": [float(self.atom_ci[0]), float(self.atom_ci[1])],
            "pass": bool(self.passed),
        }


def ks_critical_value(alpha, m):
    """ Asymptotic one-sample KS critical value c(alpha)/sqrt(m) """
    return float(scipy.stats.kstwobign.isf(alpha) / np.sqrt(m))


def atom_ci(atom_count, n_total, alpha=0.01):
    """
    Wilson score interval for a binomial proportion at level 1 - alpha
    :param atom_count: number of successes
    :param n_total: number of trials
    """
    if not 0 <= atom_count <= n_total:
        raise DomainError(f"atom_ci needs 0 <= atom_count <= n_total, got {atom_count}, {n_total}")
    if n_total == 0:
        return 0.0, 1.0

    z = scipy.stats.norm.isf(alpha / 2.0)
    p = atom_count / n_total
    denom = 1.0 + z ** 2 / n_total
    centre = (p + z ** 2 / (2.0 * n_total)) / denom
    half = z * np.sqrt(p * (1.0 - p) / n_total + z ** 2 / (4.0 * n_total ** 2)) / denom
    return float(max(0.0, centre - half)), float(min(1.0, centre + half))


def ks_test_continuous(empirical, law, alpha=0.01):
    """
    One-sample KS test of the continuous samples against the law's continuous part renormalized,
    combined with a Wilson check of the atom frequency against the law's atom mass
    :param empirical: EmpiricalLaw
    :param law: MixedSojournLaw
    :param alpha: significance level
    """
    m = len(empirical.continuous_samples)
    if m == 0:
        raise DomainError("ks_test_continuous needs at least one continuous sample")

    result = scipy.stats.kstest(empirical.continuous_samples, law.conditional_cdf)
    critical = ks_critical_value(alpha, m)

    # Atom check always applies; laws without atoms expect an interval containing 0
    interval = atom_ci(empirical.atom_count, empirical.n_total, alpha)
    covered = interval[0] <= law.atom_mass <= interval[1]

    return GofReport(
        ks_stat=float(result.statistic), ks_critical=critical, atom_freq=empirical.atom_freq,
        atom_ci=interval, passed=bool(result.statistic < critical and covered),
        extras={"p_value": float(result.pvalue), "law_atom_mass": law.atom_mass, "n_continuous": m}
    )


def two_sample_ks(first, second, alpha=0.01):
    """
    Two-sample KS test on the continuous parts, with the atom frequencies compared through a
    two-proportion z-interval on their difference
    """
    m, n = len(first.continuous_samples), len(second.continuous_samples)
    if m == 0 or n == 0:
        raise DomainError("two_sample_ks needs continuous samples on both sides")

    result = scipy.stats.ks_2samp(first.continuous_samples, second.continuous_samples)
    critical = float(scipy.stats.kstwobign.isf(alpha) * np.sqrt((m + n) / (m * n)))

    # Two-proportion interval on the atom-frequency difference
    z = scipy.stats.norm.isf(alpha / 2.0)
    p1, p2 = first.atom_freq, second.atom_freq
    se = np.sqrt(p1 * (1.0 - p1) / first.n_total + p2 * (1.0 - p2) / second.n_total)
    interval = (float(p1 - p2 - z * se), float(p1 - p2 + z * se))
    covered = interval[0] <= 0.0 <= interval[1]

    return GofReport(
        ks_stat=float(result.statistic), ks_critical=critical, atom_freq=float(p1 - p2),
        atom_ci=interval, passed=bool(result.statistic < critical and covered),
        extras={"p_value": float(result.pvalue), "n_first": m, "n_second": n}
    )


def mean_with_se(empirical):
    """ Sample mean of all occupation times (atoms at their location) and its standard error """
    samples = empirical.all_samples()
    return float(np.mean(samples)), float(np.std(samples, ddof=1) / np.sqrt(samples.size))


def chi_square_homogeneity(first, second, bins):
    """
    Chi-square homogeneity test between two samples binned on common edges
    :return: p-value of scipy.stats.chi2_contingency on the 2 x k table (empty columns dropped)
    """
    table = np.vstack([np.histogram(first, bins=bins)[0], np.histogram(second, bins=bins)[0]])
    table = table[:, table.sum(axis=0) > 0]
    return float(scipy.stats.chi2_contingency(table)[1])


def ks_non_increasing(ks_stats, allowances):
    """
    True when each KS statistic along a refining sequence exceeds its predecessor by no more than
    its own allowance (typically the KS critical value of the later sample)
    """
    ks_stats, allowances = np.asarray(ks_stats, dtype=float), np.asarray(allowances, dtype=float)
    if ks_stats.size != allowances.size:
        raise DomainError(f"ks_non_increasing needs one allowance per statistic, got {ks_stats.size} and {allowances.size}")
    return bool(np.all(np.diff(ks_stats) <= allowances[1:]))


def means_consistent(first, second, n_se=2.0):
    """
    Whether two (mean, standard error) estimates differ by less than n_se combined standard errors
    :return: (consistent flag, the shift in units of the combined standard error)
    """
    (m1, se1), (m2, se2) = first, second
    combined = float(np.hypot(se1, se2))
    shift = abs(m1 - m2) / combined if combined > 0 else (0.0 if m1 == m2 else np.inf)
    return bool(shift < n_se), float(shift)
