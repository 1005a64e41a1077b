"""Acceptance gate: eight criteria, one test (one pass/fail line) each.

Criterion 2 needs the published WTC and classroom datasets, which do not
ship with the package; it is skipped unless the files are provided under
tests/data/ or a directory named by REMFIT_DATA.
"""
import json
import math
import os
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from remfit import (
    CovariateSet,
    ConvergenceError,
    EFFECT_NAMES,
    EffectSpecification,
    Event,
    EventHistory,
    SimulationConfig,
    SufficientState,
    adequacy_report,
    build_statistics,
    fit,
    loglik,
    loglik_gradient,
    null_guessing_equivalent,
    null_loglik,
    ordinal_loglik,
    rank_ecdf,
    read_edgelist_csv,
    scenario_waiting_time,
    simulate_history,
    statistics_matrix,
    support_pairs,
)
from remfit.cli import main as cli_main
from conftest import cov_as_lists, random_covariates, random_events, random_history
from oracles import brute_vector, enum_ordinal_loglik, fd_gradient


def _report(num, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE CRITERION {num}: {status} ({detail})")
    assert ok, detail


def test_criterion_1_analytic_null_deviances():
    ordinal = -2.0 * null_loglik("ordinal", m=481, n=37)
    exact = -2.0 * null_loglik("exact", m=691, n=20, horizon=50.92)
    ok = abs(ordinal - 6921.048) <= 0.01 and abs(exact - 5987.221) <= 0.01
    _report(1, ok, f"ordinal null deviance {ordinal:.4f}, exact null deviance {exact:.4f}")


def _data_dir():
    env = os.environ.get("REMFIT_DATA")
    if env and Path(env).is_dir():
        return Path(env)
    local = Path(__file__).parent / "data"
    if local.is_dir():
        return local
    return None


def test_criterion_2_dataset_reproduction():
    root = _data_dir()
    needed = ["wtc_edgelist.csv", "wtc_icr.csv", "classroom_edgelist.csv"]
    if root is None or not all((root / f).exists() for f in needed):
        pytest.skip(
            "public datasets not present; provide wtc_edgelist.csv (ordinal t,s,r), "
            "wtc_icr.csv (37 0/1 rows), classroom_edgelist.csv (exact t,s,r with "
            "terminal horizon row) under tests/data/ or $REMFIT_DATA"
        )
    wtc = read_edgelist_csv(root / "wtc_edgelist.csv", n=37, timing="ordinal")
    icr = np.loadtxt(root / "wtc_icr.csv").reshape(37, 1)
    cov = CovariateSet(inter=icr)
    fit1 = fit(wtc, EffectSpecification(("CovInt",)), covariates=cov)
    fit3 = fit(wtc, EffectSpecification(("CovInt", "PSAB-BA")), covariates=cov)
    classroom = read_edgelist_csv(root / "classroom_edgelist.csv", n=20, timing="exact")
    ones = CovariateSet(snd=np.ones((20, 1)))
    cfit = fit(classroom, EffectSpecification(("CovSnd",)), covariates=ones)
    pacing = 380.0 * math.exp(cfit.theta[0])
    checks = [
        abs(fit1.theta[0] - 2.104464) <= 1e-3,
        abs(fit1.se[0] - 0.069817) <= 1e-3,
        abs(fit1.bic - 6200.174) <= 0.05,
        abs((fit1.bic - fit3.bic) - 3568.707) <= 0.1,
        abs(cfit.theta[0] - (-3.332287)) <= 1e-3,
        abs(pacing - 13.57031) <= 0.01,
    ]
    _report(2, all(checks), f"wtcfit1 coef {fit1.theta[0]:.6f}, pacing {pacing:.5f}")


def test_criterion_3_hazard_multiplier_arithmetic():
    checks = [
        f"{math.exp(2.104464):.6g}" == "8.20271",
        f"{math.exp(2 * 2.104464):.6g}" == "67.2844",
        abs(scenario_waiting_time(-4.983913629371181, multiplicity=380) - 0.3843285) <= 1e-4,
        abs(scenario_waiting_time(-3.7266187820962835, multiplicity=36) - 1.153845) <= 1e-4,
    ]
    _report(
        3,
        all(checks),
        f"exp multipliers {math.exp(2.104464):.6g}/{math.exp(2 * 2.104464):.6g}, "
        "scenario waits reproduced",
    )


NON_GROUP = [name for name in EFFECT_NAMES if "0" not in name]


def test_criterion_4_oracle_equivalence():
    rng = np.random.default_rng(777)
    worst = 0.0
    for case in range(1000):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(0, 7))
        events, _ = random_events(rng, n, m, "ordinal")
        cov = random_covariates(rng, n, p_snd=2, p_event=1)
        k = int(rng.integers(3, 7))
        names = [str(x) for x in rng.choice(NON_GROUP, size=k, replace=False)]
        group = None
        if case % 4 == 0:
            group = int(rng.integers(n))
            names.append("PSAB-B0")
        spec = EffectSpecification(tuple(names), group_actor=group)
        state = SufficientState(n, group=group)
        prefix = []
        covl = cov_as_lists(cov)
        snd, rec = support_pairs(n)
        for step in range(m + 1):
            mat = statistics_matrix(state, spec, cov)
            for idx in range(len(snd)):
                brute = brute_vector(
                    spec.entries, prefix, n, int(snd[idx]), int(rec[idx]), covl, group
                )
                assert mat[idx].tolist() == brute, (case, step, idx)
            if step < m:
                ev = events[step]
                state.push(ev.s, ev.r)
                prefix.append((ev.s, ev.r))
        if m > 0:
            h = EventHistory(n=n, timing="ordinal", events=tuple(events))
            stats = build_statistics(h, spec, cov=cov)
            theta = rng.normal(scale=0.5, size=stats.k)
            got = ordinal_loglik(stats, theta).total
            want = enum_ordinal_loglik(
                [(e.s, e.r) for e in events], n, list(spec.entries), theta.tolist(), covl, group
            )
            worst = max(worst, abs(got - want))
    ok = worst <= 1e-12
    _report(4, ok, f"1000 cases, statistics exact, max loglik gap {worst:.2e}")


def test_criterion_5_gradient_correctness():
    rng = np.random.default_rng(20260816)
    worst = {"ordinal": 0.0, "exact": 0.0}
    for timing in ("ordinal", "exact"):
        for _ in range(100):
            n = int(rng.integers(3, 6))
            m = int(rng.integers(2, 12))
            h = random_history(rng, n, m, timing)
            cov = random_covariates(rng, n, p_snd=2)
            spec = EffectSpecification(
                ("NIDSnd", "NODRec", "CovSnd", "RRecSnd", "PSAB-BA", "OTPSnd")
            )
            stats = build_statistics(h, spec, cov=cov)
            theta = rng.normal(scale=0.5, size=stats.k)
            grad = loglik_gradient(stats, theta)
            fd = np.array(
                fd_gradient(lambda v: loglik(stats, np.asarray(v)).total, theta.tolist())
            )
            rel = float(np.abs(grad - fd).max()) / max(1.0, float(np.abs(fd).max()))
            worst[timing] = max(worst[timing], rel)
    ok = worst["ordinal"] <= 1e-6 and worst["exact"] <= 1e-6
    _report(
        5,
        ok,
        f"max relative error ordinal {worst['ordinal']:.2e}, exact {worst['exact']:.2e}",
    )


def test_criterion_6_parameter_recovery():
    spec = EffectSpecification(("CovSnd", "PSAB-BA", "RRecSnd"))
    truth = np.array([-3.0, 0.5, 1.5, 0.8])  # intercept, sender covariate, shifts
    n, m, reps = 10, 500, 50
    hits = np.zeros(truth.size)
    for rep in range(reps):
        rng = np.random.default_rng(1000 + rep)
        x = rng.normal(size=n)
        cov = CovariateSet(snd=np.column_stack([np.ones(n), x]))
        cfg = SimulationConfig(
            n=n, theta=truth, spec=spec, cov=cov, max_events=m, seed=5000 + rep
        )
        h = simulate_history(cfg)
        try:
            res = fit(h, spec, covariates=cov)
        except ConvergenceError as err:
            res = err.result
        hits += np.abs(res.theta - truth) < 3.0 * res.se
    coverage = hits / reps
    ok = bool(np.all(coverage >= 0.90))
    _report(6, ok, "coverage " + "/".join(f"{c:.2f}" for c in coverage))


def test_criterion_7_diagnostics_self_consistency():
    rng = np.random.default_rng(99)
    events, _ = random_events(rng, 6, 80, "ordinal")
    h = EventHistory(n=6, timing="ordinal", events=tuple(events))
    res = fit(h, EffectSpecification(("NIDSnd", "NODRec", "PSAB-BA", "RRecSnd")))
    rep = adequacy_report(res)
    total = float(rep.frac_below_null + rep.frac_at_null + rep.frac_above_null)
    ecdf = rank_ecdf(res.observed_ranks, res.n)
    checks = [
        total == 1.0,
        null_guessing_equivalent(37) == 1332.0,
        float(ecdf[-1, 1]) == 1.0,
    ]
    _report(
        7,
        all(checks),
        f"fraction sum {total!r}, null guessing equivalent "
        f"{null_guessing_equivalent(37)!r}, ECDF max {float(ecdf[-1, 1])!r}",
    )


def test_criterion_8_byte_identical_artifacts():
    runner = CliRunner()
    with runner.isolated_filesystem():
        rng = np.random.default_rng(4)
        lines = ["t,s,r"]
        for i in range(25):
            s = int(rng.integers(1, 6))
            r = int(rng.integers(1, 5))
            if r >= s:
                r += 1
            lines.append(f"{i + 1},{s},{r}")
        Path("events.csv").write_text("\n".join(lines) + "\n")
        Path("theta.json").write_text("[-0.5, 1.0]")
        fit_args = [
            "fit", "--edgelist", "events.csv", "--n", "5", "--timing", "ordinal",
            "--effects", "NIDSnd,PSAB-BA",
        ]
        sim_args = [
            "simulate", "--n", "5", "--theta", "theta.json",
            "--effects", "intercept,PSAB-BA", "--max-events", "40", "--seed", "42",
        ]
        for args, out_a, out_b in (
            (fit_args, "fa", "fb"),
            (sim_args, "sa", "sb"),
        ):
            ra = runner.invoke(cli_main, args + ["--out", out_a])
            rb = runner.invoke(cli_main, args + ["--out", out_b])
            assert ra.exit_code == 0, ra.output
            assert rb.exit_code == 0, rb.output
        mismatched = []
        for out_a, out_b in (("fa", "fb"), ("sa", "sb")):
            names_a = sorted(p.name for p in Path(out_a).iterdir())
            names_b = sorted(p.name for p in Path(out_b).iterdir())
            assert names_a == names_b
            for name in names_a:
                if Path(out_a, name).read_bytes() != Path(out_b, name).read_bytes():
                    mismatched.append(name)
        _report(8, not mismatched, f"mismatched artifacts: {mismatched or 'none'}")
