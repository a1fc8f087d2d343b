"""Smoke tests for the Python bindings: the compiled core is importable and a
few cross-language invariants hold (values are pinned against the C++ suite)."""

import json

import pytest

import actionlab


def test_version():
    assert actionlab.__version__ == "1.0.0"
    assert actionlab.version_string() == "actionlab 1.0.0"


def test_action_construction_and_values():
    action = actionlab.make_action("harmonic")
    assert action.n_slices == 16
    assert action.n_interior == 15
    assert action.dt == 0.5
    assert action.hbar == 1.0

    path = actionlab.linear_path(action)
    assert len(path) == 17
    assert path[0] == 0.0 and path[-1] == 1.0

    s = actionlab.action_value(action, path)
    assert s > 0.0
    grad = actionlab.action_gradient(action, actionlab.classical_path(action))
    assert max(abs(g) for g in grad) < 1e-9


def test_exact_suite_matches_reference_layout():
    action = actionlab.make_action("harmonic")
    report = actionlab.evaluate_suite("exact", action)
    assert report.backend == "exact"
    assert len(report.checks) == 51
    assert report.summary.exit_status == 0
    assert report.summary.n_skipped == 6  # negative powers have no closed form
    assert report.checks[0].check_id == "EHRENFEST[sigma=4]"

    parsed = json.loads(report.to_json())
    assert parsed["meta"]["backend"] == "exact"
    assert len(parsed["checks"]) == 51
    assert "note" not in parsed["checks"][0]
    assert report.to_csv().startswith("check_id,")


def test_exact_check_second_variation():
    action = actionlab.make_action("harmonic")
    check = actionlab.exact_check(action, actionlab.IdentityId.second_var(), 8, 8)
    assert check.passed and not check.skipped
    assert check.lhs == pytest.approx(4.5)  # 2 m / dt + dt V'' at the diagonal
    flipped = actionlab.exact_check(
        action, actionlab.IdentityId.second_var(), 8, 8, flip_hbar_sign=True
    )
    assert not flipped.passed
    assert flipped.rhs == pytest.approx(-4.5)


def test_zerodim_oracles():
    tilted = actionlab.make_zerodim_model(1.0, 0.5, 1.0, 0.0, 0.1)
    assert actionlab.model_min_s(tilted) == pytest.approx(0.880277, abs=3e-6)

    check = actionlab.euclidean_identity_check(
        tilted, actionlab.IdentityId.second_var()
    )
    assert check.passed
    assert check.lhs == pytest.approx(1.82436739199951, rel=1e-9)

    mink = actionlab.make_zerodim_model(
        0.0, 0.0, 1.0, 0.0, 0.0, 1.0, actionlab.Signature.Minkowski
    )
    res = actionlab.minkowski_identity_residual(
        mink, actionlab.IdentityId.ehrenfest(), 0.05
    )
    assert res.r == 0.0  # parity makes the pure-gaussian row exactly zero
    assert res.two_eps_ox == 0.0


def test_error_hierarchy():
    with pytest.raises(actionlab.ConfigError):
        actionlab.make_action("warp")
    with pytest.raises(actionlab.ActionlabError):  # base class catches too
        actionlab.make_zerodim_model(0.0, 0.0, 1.0, 0.0, -1.0)
    with pytest.raises(actionlab.ConfigError):
        actionlab.evaluate_suite("fft", actionlab.make_action("harmonic"))


def test_config_hash_is_deterministic():
    h1 = actionlab.config_hash_of_text("[model]\nmass = 1\n")
    h2 = actionlab.config_hash_of_text("[model]\nmass=1.0\n")
    assert h1 == h2  # semantically equal configs hash identically
    assert len(h1) == 16
    assert all(c in "0123456789abcdef" for c in h1)
    h3 = actionlab.config_hash_of_text("[model]\nmass = 2\n")
    assert h3 != h1


def test_identity_factories():
    ids = actionlab.default_identities()
    assert [i.name() for i in ids] == [
        "EHRENFEST",
        "POWER(1)",
        "POWER(2)",
        "POWER(3)",
        "NEGPOWER(1)",
        "NEGPOWER(2)",
        "EXP(0.5)",
        "EXP(1)",
        "SECOND_VAR",
        "CHAIN(3)",
        "CHAIN(4)",
    ]
    assert actionlab.IdentityId.chain(3).uses_tau()
    assert not actionlab.IdentityId.power(2).uses_tau()
    assert actionlab.paper_tag(actionlab.IdentityId.ehrenfest())
