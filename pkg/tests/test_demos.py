"""Scenario harness and the shipped demo bundles."""

from __future__ import annotations

import json

import pytest

from seclink.demos import (
    BUNDLES,
    attribute_mechanism,
    logging_bundle,
    run_scenario,
    zip_bundle,
)
from seclink.demos.harness import webserver_interface
from seclink.effects import Caller, IoOp
from seclink.httputil import valid_http_request, valid_http_response
from seclink.worlds import make_world


def test_all_bundle_scenarios_green():
    for factory in BUNDLES.values():
        bundle = factory()
        for name in bundle.context_names():
            for i, world in enumerate(bundle.worlds):
                report = run_scenario(bundle, name, world, i)
                assert report.ok, report.render_text()


def test_webserver_answers_every_request(ws_bundle):
    report = run_scenario(ws_bundle, "benign", ws_bundle.worlds[4])
    assert report.result == 3
    writes = [e for e in report.run.local if e.op is IoOp.WRITE]
    assert len(writes) == 3


def test_empty_world_serves_nothing(ws_bundle):
    report = run_scenario(ws_bundle, "benign", ws_bundle.worlds[0])
    assert report.result == 0
    assert report.ok


def test_scenario_budget_caps_served_requests(ws_bundle):
    world = make_world(
        files={"/temp/index.html": b"x"},
        requests=[(i, b"GET /index.html HTTP/1.1\r\n\r\n") for i in range(1, 6)],
        max_iterations=2,
    )
    report = run_scenario(ws_bundle, "benign", world)
    assert report.result == 2
    assert report.ok


def test_behaviour_of_whole_server_within_post(ws_bundle):
    from seclink.demos.harness import link_whole
    from seclink.traces import beh, satisfies

    whole = link_whole(ws_bundle, ws_bundle.context("benign"))
    behaviour = beh(whole, ws_bundle.worlds, ws_bundle.interface.mstate)
    assert satisfies(behaviour, ws_bundle.interface.whole_run_post)
    assert len(behaviour) > 1


def test_adversarial_handler_served_by_400(ws_bundle):
    world = make_world(files={}, requests=[(1, b"GET /x HTTP/1.1\r\n\r\n")])
    report = run_scenario(ws_bundle, "adv1", world)
    writes = [e for e in report.run.local if e.op is IoOp.WRITE]
    assert len(writes) == 1
    assert writes[0].arg[1].startswith(b"HTTP/1.1 400")


def test_blocked_handlers_leave_no_ctx_events(ws_bundle):
    for name in ("adv3", "adv4", "adv5"):
        report = run_scenario(ws_bundle, name, ws_bundle.worlds[1])
        assert all(e.caller is Caller.PROG for e in report.run.local), name


def test_mechanism_attribution_matrix(ws_bundle):
    for name, expected in ws_bundle.expected_mechanism.items():
        found = attribute_mechanism(ws_bundle.interface, ws_bundle.context(name))
        if expected is None:
            assert found is None, name
        else:
            assert found is not None and found.startswith(expected), (name, found)


def test_dsl_contexts_match_matrix(ws_bundle):
    from seclink.demos.dsl_handlers import DSL_COUNTERPART

    for dsl_name, hand_name in DSL_COUNTERPART.items():
        expected = ws_bundle.expected_mechanism[hand_name]
        found = attribute_mechanism(ws_bundle.interface, ws_bundle.context(dsl_name))
        if expected is None:
            assert found is None
        else:
            assert found is not None and found.startswith(expected)


def test_path_escape_is_blocked(ws_bundle):
    world = make_world(files={}, requests=[(1, b"GET /../etc/passwd HTTP/1.1\r\n\r\n")])
    report = run_scenario(ws_bundle, "benign", world)
    assert report.ok
    assert not any(e.caller is Caller.CTX and e.op is IoOp.OPENFILE for e in report.run.local)


def test_allow_all_in_tmp_policy_variant():
    iface = webserver_interface("allow_all_in_tmp")
    # the laxer policy admits writes to the context's own files
    from seclink.monitor import replay
    from seclink.effects import Event, Ok

    opened = Event(Caller.CTX, IoOp.OPENFILE, ("/temp/a.txt", (), 0), Ok(5))
    state = replay(iface.mstate, [opened])
    assert iface.policy(state, IoOp.WRITE, (5, b"x"))
    assert not iface.policy(state, IoOp.WRITE, (4, b"x"))
    with pytest.raises(KeyError):
        webserver_interface("nope")


def test_logging_alternation_trace():
    bundle = logging_bundle()
    report = run_scenario(bundle, "well-behaved", bundle.worlds[0])
    callers = [e.caller for e in report.run.local]
    assert callers == [
        Caller.PROG,
        Caller.CTX,
        Caller.PROG,
        Caller.CTX,
        Caller.PROG,
        Caller.CTX,
    ]
    assert report.result == 3


def test_zip_reports(tmp_path):
    bundle = zip_bundle()
    report = run_scenario(bundle, "benign", bundle.worlds[0])
    payload = json.loads(report.to_json())
    assert payload["bundle"] == "zip"
    assert payload["verdicts"]["whole-run-post"] is True
    assert any("Ctx Write" in line for line in payload["trace"])


def test_report_rendering(ws_bundle):
    report = run_scenario(ws_bundle, "adv2", ws_bundle.worlds[1])
    text = report.render_text()
    assert "[PASS]" in text and "mechanism" in text


def test_http_validity_predicates():
    assert valid_http_request(b"GET /a HTTP/1.1\r\n\r\n")
    assert valid_http_request(b"POST /a HTTP/1.0\r\nHost: h\r\n\r\n")
    assert not valid_http_request(b"GET /a HTTP/1.1\r\n")  # missing terminator
    assert not valid_http_request(b"junk")
    assert valid_http_response(b"HTTP/1.1 200 OK\r\n\r\nbody")
    assert valid_http_response(b"HTTP/1.1 404 Not Found\r\nX: y\r\n\r\n")
    assert not valid_http_response(b"hello")


def test_unknown_context_name(ws_bundle):
    with pytest.raises(KeyError):
        ws_bundle.context("missing")
