"""Monitor-state descriptors, policies, and the secure IO library."""

from __future__ import annotations

import random

import pytest

from generators import random_trace
from seclink.demos import webserver
from seclink.effects import Caller, Event, IoOp, Ok, is_contract_failure, is_ok
from seclink.interp import interpret
from seclink.monitor import (
    enforce_policy,
    full_trace_mstate,
    last_event_mstate,
    replay,
    stateless_mstate,
    webserver_mstate,
)
from seclink.traces import did_not_respond, is_opened_by_ctx, wrote_to
from seclink.worlds import make_world

ALL_DESCS = [webserver_mstate(), full_trace_mstate(), last_event_mstate(), stateless_mstate()]


@pytest.mark.parametrize("desc", ALL_DESCS, ids=lambda d: d.name)
def test_initial_state_abstracts_empty(desc):
    assert desc.abstracts(desc.init, ())


@pytest.mark.parametrize("desc", ALL_DESCS, ids=lambda d: d.name)
def test_update_preserves_abstraction(desc):
    rng = random.Random(7)
    for _ in range(300):
        events = random_trace(rng, 12)
        state = desc.init
        history = ()
        for e in events:
            assert desc.abstracts(state, history)
            state = desc.upd(state, e)
            history = (e,) + history
        assert desc.abstracts(state, history)


def test_webserver_state_matches_trace_oracles():
    rng = random.Random(11)
    for _ in range(200):
        events = random_trace(rng, 14)
        state = webserver_mstate().init
        history = ()
        for e in events:
            state = webserver_mstate().upd(state, e)
            history = (e,) + history
            for fd in range(1, 9):
                assert (fd in state.ctx_opened) == is_opened_by_ctx(fd, history)
                assert (fd in state.written) == wrote_to(fd, history)
            assert state.responded == (not did_not_respond(history))


def test_webserver_upd_examples():
    desc = webserver_mstate()
    opened = desc.upd(desc.init, Event(Caller.CTX, IoOp.OPENFILE, ("/temp/a", (), 0), Ok(5)))
    assert opened.ctx_opened == (5,)
    closed = desc.upd(opened, Event(Caller.CTX, IoOp.CLOSE, 5, Ok(())))
    assert closed.ctx_opened == ()
    written = desc.upd(desc.init, Event(Caller.PROG, IoOp.WRITE, (4, b"r"), Ok(())))
    assert 4 in written.written and written.responded


def test_policy_soundness_against_spec():
    # acceptance of the state-level policy implies the trace-level policy
    # on every replayed history
    rng = random.Random(13)
    desc = webserver_mstate()
    probes = [
        (IoOp.OPENFILE, ("/temp/a.txt", (), 0)),
        (IoOp.OPENFILE, ("/etc/passwd", (), 0)),
        (IoOp.READ, 5),
        (IoOp.CLOSE, 5),
        (IoOp.WRITE, (5, b"x")),
        (IoOp.SOCKET, ()),
    ]
    for _ in range(400):
        events = random_trace(rng, 12)
        h = tuple(reversed(events))
        state = replay(desc, events)
        for op, arg in probes:
            if webserver.policy(state, op, arg):
                assert webserver.policy_spec(h, Caller.CTX, op, arg)


def make_lib():
    return enforce_policy(webserver.policy, webserver_mstate())


def test_denied_call_leaves_everything_unchanged():
    lib = make_lib()
    world = make_world(files={"/temp/a.txt": b"x"})
    run = interpret(lib.call(IoOp.OPENFILE, ("/etc/passwd", (), 0)), world, lib.desc)
    assert is_contract_failure(run.result)
    assert run.result.why == "policy:Openfile"
    assert run.local == ()
    assert run.mstate == lib.desc.init


def test_allowed_call_records_one_ctx_event():
    lib = make_lib()
    world = make_world(files={"/temp/a.txt": b"x"})
    run = interpret(lib.call(IoOp.OPENFILE, ("/temp/a.txt", (), 0)), world, lib.desc)
    assert is_ok(run.result)
    assert len(run.local) == 1
    assert run.local[0].caller is Caller.CTX
    assert run.audit_ok


def test_atomicity_on_random_seeded_states():
    rng = random.Random(17)
    lib = make_lib()
    probes = [
        (IoOp.OPENFILE, ("/temp/a.txt", (), 0)),
        (IoOp.OPENFILE, ("/nope/x", (), 0)),
        (IoOp.READ, 4),
        (IoOp.CLOSE, 4),
        (IoOp.WRITE, (4, b"x")),
        (IoOp.SOCKET, ()),
    ]
    world = make_world(files={"/temp/a.txt": b"x"})
    for _ in range(150):
        seed = random_trace(rng, 10)
        before = replay(lib.desc, seed)
        op, arg = probes[rng.randrange(len(probes))]
        run = interpret(lib.call(op, arg), world, lib.desc, seed_history=tuple(seed))
        if is_contract_failure(run.result):
            assert run.local == ()
            assert run.mstate == before
        else:
            assert len(run.local) == 1
            assert run.local[0].caller is Caller.CTX
            assert (run.local[0].op, run.local[0].arg) == (op, arg)


def test_replay_folds_from_init():
    rng = random.Random(23)
    events = random_trace(rng, 8)
    desc = full_trace_mstate()
    assert replay(desc, events) == tuple(reversed(events))
