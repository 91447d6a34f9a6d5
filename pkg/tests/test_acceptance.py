"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line; the lines are repeated in
the terminal summary so they show up without ``-s``.
"""

import contextlib
import json
import os
import random
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE_LINES, BACKENDS
from implicitauth import events as ev
from implicitauth import fixtures as fx
from implicitauth.cache import SMS_PARAMS, PriorityCache
from implicitauth.config import BROWSER_POLL_INTERVAL_S, DEFAULTS, EngineConfig, ThresholdConfig, from_flat
from implicitauth.decision import classify
from implicitauth.evaluation import replay, sweep
from implicitauth.kernels import ABNORMAL, NORMAL, classify_stream
from implicitauth.thresholds import run_observer, threshold_stream

STRATEGIES = ("static", "sd_block", "ewma_direct", "ewma_sd_block")
SCEN = Path(__file__).resolve().parent.parent / "scenarios"


@contextlib.contextmanager
def criterion(name, limit_s=None):
    """Time the block, enforce the runtime limit and report one line."""
    start = time.perf_counter()
    detail = {"text": ""}
    status = "FAIL"
    try:
        yield detail
        elapsed = time.perf_counter() - start
        if limit_s is not None:
            assert elapsed < limit_s, f"took {elapsed:.2f}s, limit {limit_s}s"
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        line = f"{status} {name} ({elapsed:.2f}s{', ' + detail['text'] if detail['text'] else ''})"
        ACCEPTANCE_LINES.append(line)
        print(line)


class _Pt:
    def __init__(self, index, ts, value):
        self.index, self.ts, self.value = index, ts, value


def test_ewma_direct_matches_closed_form():
    rng = np.random.default_rng(20150210)
    alphas = (0.05, 0.2, 0.5, 1.0)
    with criterion("ewma_direct closed-form oracle, 1000 streams, tol 1e-9", 5.0) as d:
        worst = 0.0
        for k in range(1000):
            n = int(rng.integers(1, 501))
            scores = rng.uniform(0, 100, n)
            alpha = alphas[k % 4]
            cfg = ThresholdConfig(strategy="ewma_direct", alpha=alpha)
            got = threshold_stream(scores, np.zeros(n, dtype=np.int64), cfg)
            ref = oracles.ewma_closed_form_matrix(scores, alpha)
            worst = max(worst, float(np.max(np.abs(got - ref))))
        d["text"] = f"max abs err {worst:.2e}"
        assert worst <= 1e-9


def test_sd_block_matches_batch_oracle():
    rng = random.Random(17)
    with criterion("sd_block previous-block oracle, 200 streams x L in {1,3,10,50}, tol 1e-9", 5.0) as d:
        worst = 0.0
        checked = 0
        for _ in range(200):
            n = rng.randint(1, 500)
            scores = [rng.uniform(0, 100) for _ in range(n)]
            ts = np.arange(n, dtype=np.int64)
            for L in (1, 3, 10, 50):
                cfg = ThresholdConfig(strategy="sd_block", block_len_events=L)
                ref_list = oracles.sd_block_batch(scores, L)
                ref = np.array([np.nan if r is None else r for r in ref_list])
                warm = np.isnan(ref)
                for backend in BACKENDS:
                    got = threshold_stream(scores, ts, cfg, backend=backend)
                    assert np.array_equal(np.isnan(got), warm)
                    if not warm.all():
                        worst = max(worst, float(np.max(np.abs(got[~warm] - ref[~warm]))))
                    checked += int((~warm).sum())
                stream = run_observer(cfg, [_Pt(i, i, s) for i, s in enumerate(scores)])
                for p, r in zip(stream, ref_list):
                    assert (p.value is None) == (r is None)
                    if r is not None:
                        worst = max(worst, abs(p.value - r))
        d["text"] = f"{checked} thresholds, max abs err {worst:.2e}"
        assert worst <= 1e-9


def test_decision_band_exhaustive():
    with criterion("decision band, exhaustive AS x threshold 0..60 x V 0..15, exact", 1.0) as d:
        as_grid = np.arange(0, 121) / 2.0  # 0, 0.5, ..., 60
        mismatches = 0
        cells = 0
        for thr in range(61):
            for v in range(16):
                thr_arr = np.full(len(as_grid), float(thr))
                codes = classify_stream(as_grid, thr_arr, float(v)).tolist()
                for a, code in zip(as_grid.tolist(), codes):
                    expect = oracles.classify_transcription(a, thr, v)
                    got = classify(a, float(thr), float(v)).value
                    kernel = {NORMAL: "normal", ABNORMAL: "abnormal"}[code]
                    mismatches += (got != expect) + (kernel != expect)
                    cells += 1
        d["text"] = f"{cells} cells, {mismatches} mismatches"
        assert mismatches == 0


def test_recognition_rate_monotone_in_tolerance():
    with criterion("recognition rate non-decreasing in V=0..10, 20 fixtures x 4 strategies", 30.0) as d:
        violations = 0
        columns = 0
        for seed in fx.LEGIT_SEEDS:
            log = fx.legitimate_log(seed)
            rows = sweep(log, fx.CONTACTS, EngineConfig(),
                         {"strategy": list(STRATEGIES), "tolerance": list(range(11))})
            for strategy in STRATEGIES:
                rates = [r.metrics.recognition_rate for r in rows if r.params["strategy"] == strategy]
                assert len(rates) == 11 and None not in rates
                violations += sum(b < a for a, b in zip(rates, rates[1:]))
                columns += 1
        d["text"] = f"{columns} columns, {violations} violations"
        assert violations == 0


def test_one_week_cache_expiry():
    with criterion("OT=1 SMS entry retained at 168 h, pruned at 168 h + 1 s, exact") as d:
        t0 = 1_000_000
        week = 168 * 3600
        cache = PriorityCache(SMS_PARAMS)
        cache.record("+447700900123", t0)
        assert cache.value("+447700900123", t0 + week) == 0.0
        assert cache.prune(t0 + week) == []
        assert "+447700900123" in cache.entries
        assert cache.prune(t0 + week + 1) == ["+447700900123"]
        assert cache.entries == {}
        d["text"] = "value at 168 h = 0.0"


def test_adversary_qualitative():
    with criterion("adversary fixtures: EWMA detect both cases, case2 faster, static N/A", 60.0) as d:
        summary = []
        for seed in fx.ADVERSARY_SEEDS:
            results = {}
            for case in ("case1", "case2"):
                log = fx.adversary_log(case, seed)
                for strategy in STRATEGIES:
                    cfg = from_flat({"threshold.strategy": strategy})
                    _, m = replay(log, fx.CONTACTS, cfg, attack_start=fx.ATTACK_START)
                    results[case, strategy] = m
            for strategy in ("ewma_direct", "ewma_sd_block"):
                c1, c2 = results["case1", strategy], results["case2", strategy]
                assert c1.detected and c2.detected, (seed, strategy)
                assert c2.elapsed_minutes < c1.elapsed_minutes, (seed, strategy)
                summary.append(f"{seed}/{strategy}: {c1.elapsed_minutes:.1f}->{c2.elapsed_minutes:.1f} min")
            for case in ("case1", "case2"):
                assert not results[case, "static"].detected, (seed, case)
        d["text"] = "; ".join(summary)


def _cli(args, hashseed):
    env = {**os.environ, "PYTHONHASHSEED": str(hashseed)}
    subprocess.run([sys.executable, "-m", "implicitauth", *args], check=True, env=env,
                   capture_output=True)


def test_cli_outputs_byte_identical(tmp_path):
    with criterion("replay and sweep CSV/JSON byte-identical across runs") as d:
        outputs = []
        for run in range(2):
            w = tmp_path / f"run{run}"
            w.mkdir()
            legit, attacked = w / "legit.jsonl", w / "attacked.jsonl"
            _cli(["gen", "--profile", str(SCEN / "drifting_profile.json"), "--from", str(fx.LOG_START),
                  "--to", str(fx.LOG_END), "--seed", "23", "--out", str(legit)], run)
            _cli(["attack", "--log", str(legit), "--spec", str(SCEN / "attack_case1.json"),
                  "--seed", "23", "--out", str(attacked)], run)
            common = ["--log", str(attacked), "--contacts", str(SCEN / "contacts.txt"),
                      "--config", str(SCEN / "ewma_sd_block.json"), "--attack-start", str(fx.ATTACK_START)]
            _cli(["replay", *common, "--out", str(w / "d.csv"), "--metrics", str(w / "m.json")], run)
            _cli(["sweep", *common, "--grid", str(SCEN / "grid_tolerance.json"), "--out", str(w / "s.csv")], run)
            outputs.append({p.name: p.read_bytes() for p in sorted(w.iterdir())})
        assert outputs[0] == outputs[1]
        json.loads(outputs[0]["m.json"])
        d["text"] = f"{len(outputs[0])} files compared"


def test_default_config_snapshot():
    with criterion("default configuration snapshot") as d:
        expected = {
            "threshold.alpha": 0.2,
            "decision.tolerance": 10.0,
            "scoring.wifi_min_session_s": 120,
            "cache.sms.base": 120.0, "cache.sms.weight": 48.0,
            "cache.call.base": 120.0, "cache.call.weight": 48.0,
            "cache.browser.base": 72.0, "cache.browser.weight": 8.0,
            "cache.wifi.base": 100.0, "cache.wifi.weight": 18.0,
        }
        snapshot = {k: DEFAULTS[k] for k in expected}
        assert snapshot == expected
        assert BROWSER_POLL_INTERVAL_S == 20 * 60
        d["text"] = f"{len(expected) + 1} values"
