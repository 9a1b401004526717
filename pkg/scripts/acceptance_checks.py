"""
@file acceptance_checks.py

Asserts the comparisons that span several runs of acceptance.py and ablation_steps.py: the KS trend of
the finite-u meander toward the limit law, the two-drift excursion comparison and the step-doubling means

Usage: python3 scripts/acceptance_checks.py [experiments folder]
"""
import os
import sys
import json

sys.path.append(os.path.join(os.path.dirname(os.path.abspath(__file__)), ".."))
from utils.dataloader import load_empirical_law
from utils.metrics import ks_non_increasing, means_consistent, two_sample_ks

levels = [0.4, 0.2, 0.1, 0.05]
steps = [256, 512, 1024, 2048, 4096]


def load_report(root, expname, law):
    with open(os.path.join(root, expname, f"validate_{law}.json"), "r") as f:
        return json.load(f)


def check_weak_limit(root):
    """ KS distance of the finite-u meander to the limit law, non-increasing as u goes to 0 """
    reports = [load_report(root, f"acceptance_weak_limit_u{u}", "meander-u")["report"] for u in levels]
    ks_stats = [report["ks_stat"] for report in reports]
    for u, ks in zip(levels, ks_stats):
        print(f"=> u={u}: KS {ks:.5f}")
    return ks_non_increasing(ks_stats, [report["ks_critical"] for report in reports])


def check_drift_invariance(root):
    """ Two-sample KS between the excursion campaigns at opposite drifts """
    plus = load_empirical_law(os.path.join(root, "acceptance_excursion_plus", "sample_excursion-u.csv"))
    minus = load_empirical_law(os.path.join(root, "acceptance_excursion_minus", "sample_excursion-u.csv"))
    report = two_sample_ks(plus, minus, alpha=0.01)
    print(f"=> drift invariance: KS {report.ks_stat:.5f} (critical {report.ks_critical:.5f})")
    return report.passed


def check_step_doubling(root, family, law):
    """ Sample means of consecutive doubled step counts within 2 combined standard errors """
    estimates = []
    for n in steps:
        report = load_report(root, f"ablation_steps_{family}_{n}", law)
        estimates.append((report["sample_mean"], report["sample_se"]))

    passed = True
    for n, first, second in zip(steps[1:], estimates[:-1], estimates[1:]):
        consistent, shift = means_consistent(first, second, n_se=2.0)
        print(f"=> {family} {n // 2} -> {n} steps: mean shift {shift:.2f} s.e.")
        passed = passed and consistent
    return passed


if __name__ == '__main__':
    root = sys.argv[1] if len(sys.argv) > 1 else "experiments"
    checks = {
        "weak_limit": check_weak_limit(root),
        "drift_invariance": check_drift_invariance(root),
        "steps_meander": check_step_doubling(root, "meander", "meander-limit"),
        "steps_excursion": check_step_doubling(root, "excursion", "excursion"),
    }
    for name, passed in checks.items():
        print(f"=> {name}: {'pass' if passed else 'FAIL'}")
    sys.exit(0 if all(checks.values()) else 1)
