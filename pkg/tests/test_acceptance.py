"""Acceptance suite: one module-level check per shipping criterion.

Each test prints a single PASS/FAIL line (run with -s or -rA to see them
live).  The two full certification runs are the slow items; everything
else finishes in seconds.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad

import beccert as bc
from beccert.certify import certified_scan_general, certified_scan_iid, stitch_regimes
from beccert.cli import main as cli_main
from beccert.dist import cf, convolve_many, moments, standardize
from beccert.zero_bias import (
    StepCdf,
    kappa1,
    mixture_zero_bias_sum,
    pl_sup_distance,
    theorem3_gap,
    threepoint_g,
    threepoint_grid,
    threepoint_params,
    two_point,
    zero_bias_cdf,
    zeta3_ratio_lower,
)

from conftest import SEED, random_standardized_law


def report(num, desc, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:02d} [{status}] {desc}  {detail}")
    assert ok, f"criterion {num}: {desc} {detail}"


def test_criterion_01_general_extremal_evaluation():
    t0 = time.time()
    res = bc.prawitz_rhs(bc.General(0.5092), bc.PrawitzParams(2.4852, 5.9508))
    dt = time.time() - t0
    ok = (0.5590 <= res.dstar <= 0.5606
          and res.dstar + res.margin <= 0.5606 and dt < 10.0)
    report(1, "general extremal D*(0.5092; 2.4852, 5.9508)", ok,
           f"dstar={res.dstar:.6f} margin={res.margin:.2e} {dt:.2f}s")


def test_criterion_02_iid_extremal_evaluation():
    t0 = time.time()
    res = bc.prawitz_rhs(bc.IidFinite(0.3536, 8),
                         bc.PrawitzParams(2.6157, 8.9115))
    dt = time.time() - t0
    ok = (0.4770 <= res.dstar <= 0.4785
          and res.dstar + res.margin <= 0.4785 and dt < 10.0)
    report(2, "iid extremal D*(0.3536, n=8; 2.6157, 8.9115)", ok,
           f"dstar={res.dstar:.6f} margin={res.margin:.2e} {dt:.2f}s")


def test_criterion_03_full_general_certificate(tmp_path):
    out = tmp_path / "cert-general.json"
    code = cli_main(["certify", "general", "--parallel", "2", "--quiet",
                     "--out", str(out)])
    cert = bc.Certificate.from_json(out.read_text())
    covered = (cert.entries[0].epsilon == cert.eps_hi
               and cert.entries[-1].bridged_to <= cert.eps_lo
               and all(b.epsilon >= a.bridged_to
                       for a, b in zip(cert.entries, cert.entries[1:])))
    small_ok = (cert.small_eps_witness is not None
                and cert.small_eps_witness["value_at_eps_lo"] <= 0.5606)
    ok = (code == 0 and covered and small_ok
          and cert.global_bound <= 0.5606
          and cert.eps_lo == 0.02 and abs(cert.eps_hi - 1 / 0.5606) < 1e-12)
    report(3, "full general certificate at target 0.5606", ok,
           f"exit={code} entries={len(cert.entries)} "
           f"global={cert.global_bound:.6f}")


def test_criterion_04_full_iid_certificate(tmp_path):
    out = tmp_path / "cert-iid.json"
    code = cli_main(["certify", "iid", "--parallel", "2", "--quiet",
                     "--m", "30", "--out", str(out)])
    cert = bc.Certificate.from_json(out.read_text())
    covered = (cert.entries[0].epsilon == cert.eps_hi
               and cert.entries[-1].bridged_to <= cert.eps_lo
               and all(b.epsilon >= a.bridged_to
                       for a, b in zip(cert.entries, cert.entries[1:])))
    at_peak = [e for e in cert.entries if e.epsilon == 0.3536]
    peak_ok = False
    if at_peak:
        detail = at_peak[0].n_detail
        finite = {int(k): v for k, v in detail.items()
                  if not k.startswith("tail@")}
        peak_ok = max(finite, key=finite.get) == 8
    ok = (code == 0 and covered and peak_ok
          and cert.global_bound <= 0.4785
          and cert.eps_lo == 0.037 and abs(cert.eps_hi - 1 / 0.4785) < 1e-12)
    report(4, "full iid certificate at target 0.4785 (m=30)", ok,
           f"exit={code} entries={len(cert.entries)} "
           f"global={cert.global_bound:.6f} worst_n_at_0.3536="
           f"{'8' if peak_ok else '?'}")


def test_criterion_05_sharp_bound_two_point_equality():
    worst = 0.0
    for p in np.arange(0.01, 0.995, 0.01):
        d = two_point(float(p))
        k1 = kappa1(StepCdf.from_distribution(d), zero_bias_cdf(d))
        worst = max(worst, abs(0.5 * moments(d).beta3 - k1))
    ok = worst < 1e-12
    report(5, "two-point mean-metric equality on 99 laws", ok,
           f"max |kappa1 - beta3/2| = {worst:.2e}")


def test_criterion_06_sharp_bound_and_threepoint_grid():
    rng = np.random.default_rng(SEED)
    worst_gap = math.inf
    for _ in range(10_000):
        worst_gap = min(worst_gap, theorem3_gap(random_standardized_law(rng)))
    rows = threepoint_grid(25, 18, 24)
    n_points = len(rows)
    worst_g = max(threepoint_g(a, b, c) for a, b, c in rows)
    # case-boundary continuity
    worst_seam = 0.0
    for a in np.linspace(1.02, 3.5, 60):
        b_ = a - 1.0 / a
        c = 1.05 / a
        tp = threepoint_params(a, b_, c)
        if tp.feasible and b_ * c <= 1.0:
            ea = tp.r / c - tp.p * a**3 - tp.q * b_**3
            eb = tp.p * a * (a - b_ - 1 / a) ** 2 + tp.r / c - tp.p * a**3 - tp.q * b_**3
            worst_seam = max(worst_seam, abs(ea - eb))
    for b_ in np.linspace(0.0, 1.2, 60):
        c = (-b_ + math.sqrt(b_ * b_ + 4.0)) / 2.0
        a = max(1.0 / c, b_) * 1.3 + 0.2
        tp = threepoint_params(a, b_, c)
        if tp.feasible and a * (a - b_) >= 1.0:
            eb = tp.p * a * (a - b_ - 1 / a) ** 2 + tp.r / c - tp.p * a**3 - tp.q * b_**3
            ec = tp.p / a - tp.r * c**3
            worst_seam = max(worst_seam, abs(eb - ec))
    ok = (worst_gap >= -1e-10 and n_points >= 10_000
          and worst_g <= 1e-10 and worst_seam < 1e-9)
    report(6, "sharp-bound slack on 1e4 laws + 3-point grid", ok,
           f"min_gap={worst_gap:.2e} grid={n_points} max_g={worst_g:.2e} "
           f"seam={worst_seam:.2e}")


def test_criterion_07_mixture_identity_and_mean_metric():
    rng = np.random.default_rng(SEED + 7)
    worst_sup = 0.0
    worst_slack = -math.inf
    for _ in range(40):
        n = int(rng.integers(1, 5))
        parts = [random_standardized_law(rng, max_atoms=3).scaled(
            float(rng.uniform(0.4, 1.4))) for _ in range(n)]
        sigma = math.sqrt(sum(moments(d).variance for d in parts))
        scaled = [d.scaled(1.0 / sigma) for d in parts]
        mix = mixture_zero_bias_sum(parts)
        s = convolve_many(scaled)
        worst_sup = max(worst_sup, pl_sup_distance(mix, zero_bias_cdf(s)))
        eps_n = sum(moments(d).beta3 for d in scaled)
        k1 = kappa1(StepCdf.from_distribution(s), mix)
        worst_slack = max(worst_slack, k1 - 0.5 * eps_n)
    ok = worst_sup <= 1e-9 and worst_slack <= 1e-10
    report(7, "zero-bias mixture identity and mean-metric bound", ok,
           f"sup={worst_sup:.2e} slack={worst_slack:.2e}")


def test_criterion_08_cf_bound_lemma_suite():
    rng = np.random.default_rng(SEED + 8)
    ts = np.linspace(0.0, 10.0, 201)
    ok1 = ok4 = True
    for _ in range(100):
        d = random_standardized_law(rng)
        beta = moments(d).beta3
        if np.any(np.abs(cf(d, ts)) ** 2 > 1.0 + bc.b(ts, beta + 1.0) + 1e-9):
            ok1 = False
        d2 = random_standardized_law(rng)
        z = kappa1(StepCdf.from_distribution(d), StepCdf.from_distribution(d2))
        if np.any(np.abs(cf(d, ts[1:]) - cf(d2, ts[1:])) > ts[1:] * z + 1e-9):
            ok4 = False
    gammas = np.linspace(0.05, 4.0, 80)
    ok2 = True
    prev = None
    for g in gammas:
        vals = bc.b(ts, float(g))
        if prev is not None and np.any(vals < prev - 1e-9):
            ok2 = False
        prev = vals
    # integral CF-distance bound with exact CFs of small collections
    ok3 = True
    for spec in ([(0.5, 1.0)] * 3, [(0.7, 1.0), (0.55, 0.8)]):
        parts = [two_point(p).scaled(w) for p, w in spec]
        sigma = math.sqrt(sum(moments(d).variance for d in parts))
        parts = [d.scaled(1.0 / sigma) for d in parts]
        s = convolve_many(parts)
        eps_n = sum(moments(d).beta3 for d in parts)
        lhs = np.abs(cf(s, ts) - np.exp(-ts * ts / 2.0))
        rhs = np.minimum(bc.delta_hat1(eps_n, ts), bc.delta_hat2(eps_n, ts))
        if np.any(lhs > rhs + 1e-9):
            ok3 = False
    ok = ok1 and ok2 and ok3 and ok4
    report(8, "CF lemma suite (modulus, monotone, integral, difference)", ok,
           f"L1={ok1} L2={ok2} L3={ok3} L4={ok4}")


def test_criterion_09_closed_forms_and_constants():
    rc = bc.BoundConstants.recompute()
    const_ok = (abs(rc.a - 0.099162) < 1e-6 and abs(rc.M - 3.995896) < 1e-6
                and abs(rc.l - 0.624489) < 1e-6)
    worst = 0.0
    for eps in (0.1, 0.3536, 0.5092, 0.9, 1.5):
        Ab = bc.branch_point_A(eps)
        e23 = eps ** (2.0 / 3.0)
        for t in (0.25, 0.8, 1.6, Ab, Ab + 0.8, 3.2):
            ref1, _ = scipy_quad(
                lambda s: s * s / 2.0 * math.exp((s * s - t * t) / 2.0),
                0.0, t, epsabs=1e-13, limit=300)
            worst = max(worst, abs(bc.delta_hat1(eps, t) - eps * ref1))
            ref2, _ = scipy_quad(
                lambda s: s * s / 2.0 * math.exp((s * s * e23 - t * t) / 2.0),
                0.0, min(t, Ab), epsabs=1e-13, limit=300)
            if t > Ab:
                extra, _ = scipy_quad(
                    lambda s: s * s / (2.0 * rc.l) * math.exp(
                        2.0 * rc.a * eps * s**3 - t * t / 2.0),
                    Ab, t, epsabs=1e-13, limit=300)
                ref2 += extra
            worst = max(worst, abs(bc.delta_hat2(eps, t) - eps * ref2))
    ok = const_ok and worst < 1e-9
    report(9, "Dawson closed forms vs quadrature; constants recomputed", ok,
           f"max residual={worst:.2e}")


def test_criterion_10_third_order_optimality_trend():
    v999 = zeta3_ratio_lower(0.999)
    ps = np.linspace(0.5, 0.999, 200)
    vals = [zeta3_ratio_lower(float(p)) for p in ps]
    monotone = all(y >= x - 1e-15 for x, y in zip(vals, vals[1:]))
    ok = v999 > 1.0 / 6.0 - 1e-3 and monotone
    report(10, "third-order metric ratio approaches 1/6 monotonically", ok,
           f"value(0.999)={v999:.6f}")


def test_criterion_11_exact_sums_respect_iid_constant():
    worst = -math.inf
    for p in (0.5, 0.65, 0.8, 0.9, 0.95):
        base = two_point(p)
        beta = moments(base).beta3
        for k in range(1, 11):
            parts = [base.scaled(1.0 / math.sqrt(k))] * k
            s = standardize(convolve_many(parts))
            eps_k = beta / math.sqrt(k)
            rho = bc.kolmogorov_vs_normal(s)
            worst = max(worst, rho - 0.4785 * eps_k)
    ok = worst <= 1e-9
    report(11, "exact k-fold two-point sums stay below 0.4785 eps", ok,
           f"max excess={worst:.2e}")
