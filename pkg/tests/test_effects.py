"""Computation combinators and the interpreter's core contract."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seclink.effects import Caller, Err, ErrCode, IoOp, Ok, bind, call_io, do, get_mstate, ret
from seclink.interp import CapabilityError, interpret
from seclink.monitor import stateless_mstate, webserver_mstate
from seclink.worlds import make_world


def run(comp, world, desc=None):
    return interpret(comp, world, desc or webserver_mstate())


def observe(comp, worlds):
    """(result, local trace) per world; the behavioural equality used for
    the algebraic laws."""
    desc = webserver_mstate()
    return [(r.result, r.local) for r in (interpret(comp, w, desc) for w in worlds)]


# -- small computation grammar for law tests --------------------------------


def comp_from_plan(plan):
    """Build a computation from a list of op codes (data, so hypothesis can
    shrink it)."""
    if not plan:
        return ret(0)
    head, *rest = plan

    @do
    def built():
        acc = 0
        if head == "open":
            r = yield call_io(Caller.PROG, IoOp.OPENFILE, ("/temp/a.txt", (), 0))
            acc = r.value if isinstance(r, Ok) else -1
        elif head == "state":
            s = yield get_mstate()
            acc = len(s.ctx_opened)
        else:
            r = yield call_io(Caller.PROG, IoOp.READ, 3)
            acc = len(r.value) if isinstance(r, Ok) else -2
        rest_result = yield comp_from_plan(rest)
        return acc + rest_result

    return built()


plans = st.lists(st.sampled_from(["open", "state", "read"]), max_size=4)


def some_worlds():
    return [
        make_world(files={"/temp/a.txt": b"alpha"}),
        make_world(files={}),
    ]


@given(plans)
@settings(max_examples=40, deadline=None)
def test_monad_left_identity(plan):
    f = lambda x: comp_from_plan(plan)
    worlds = some_worlds()
    assert observe(bind(ret(3), f), worlds) == observe(f(3), worlds)


@given(plans)
@settings(max_examples=40, deadline=None)
def test_monad_right_identity(plan):
    m = comp_from_plan(plan)
    worlds = some_worlds()
    assert observe(bind(m, ret), worlds) == observe(m, worlds)


@given(plans, plans, plans)
@settings(max_examples=40, deadline=None)
def test_monad_associativity(p1, p2, p3):
    m = comp_from_plan(p1)
    f = lambda x: comp_from_plan(p2)
    g = lambda x: comp_from_plan(p3)
    worlds = some_worlds()
    lhs = bind(bind(m, f), g)
    rhs = bind(m, lambda x: bind(f(x), g))
    assert observe(lhs, worlds) == observe(rhs, worlds)


# -- interpreter basics ------------------------------------------------------


def test_ret_is_pure(small_world):
    result = run(ret(5), small_world)
    assert result.result == 5
    assert result.local == ()


def test_unit_ret(small_world):
    result = run(ret(()), small_world)
    assert result.result == ()
    assert result.local == ()


def test_bind_records_one_event_per_call(small_world):
    comp = bind(call_io(Caller.PROG, IoOp.OPENFILE, ("/temp/a.txt", (), 0)), ret)
    result = run(comp, small_world)
    assert result.result == Ok(3)
    assert len(result.local) == 1
    event = result.local[0]
    assert (event.caller, event.op, event.result) == (Caller.PROG, IoOp.OPENFILE, Ok(3))


def test_call_io_records_errors_in_band(small_world):
    comp = call_io(Caller.PROG, IoOp.READ, 99)
    result = run(comp, small_world)
    assert result.result == Err(ErrCode.EBADF)
    assert len(result.local) == 1
    assert result.local[0].result == Err(ErrCode.EBADF)


def test_write_after_close_fails(small_world):
    @do
    def prog():
        fd = yield call_io(Caller.PROG, IoOp.OPENFILE, ("/temp/a.txt", (), 0))
        yield call_io(Caller.PROG, IoOp.CLOSE, fd.value)
        outcome = yield call_io(Caller.PROG, IoOp.WRITE, (fd.value, b"x"))
        return outcome

    assert run(prog(), small_world).result == Err(ErrCode.EBADF)


def test_get_mstate_records_no_event(small_world):
    comp = bind(get_mstate(), lambda s1: bind(get_mstate(), lambda s2: ret((s1, s2))))
    result = run(comp, small_world)
    assert result.local == ()
    s1, s2 = result.result
    assert s1 == s2


def test_get_mstate_tracks_updates(small_world):
    @do
    def prog():
        fd = yield call_io(Caller.CTX, IoOp.OPENFILE, ("/temp/a.txt", (), 0), via_monitor=True)
        state = yield get_mstate()
        return fd.value, state

    fd, state = run(prog(), small_world).result
    assert fd in state.ctx_opened


def test_interpret_deterministic(small_world):
    @do
    def prog():
        fd = yield call_io(Caller.PROG, IoOp.OPENFILE, ("/temp/a.txt", (), 0))
        data = yield call_io(Caller.PROG, IoOp.READ, fd.value)
        return data

    comp = prog()
    first = run(comp, small_world)
    second = run(comp, small_world)
    assert (first.result, first.local) == (second.result, second.local)
    # the caller's world is untouched
    assert small_world.next_fd == 3


def test_local_trace_chronological_and_history_reversed(small_world):
    @do
    def prog():
        fd = yield call_io(Caller.PROG, IoOp.OPENFILE, ("/temp/a.txt", (), 0))
        yield call_io(Caller.PROG, IoOp.CLOSE, fd.value)
        return 0

    result = run(prog(), small_world)
    assert [e.op for e in result.local] == [IoOp.OPENFILE, IoOp.CLOSE]
    assert result.history == tuple(reversed(result.local))


def test_seed_history_extends(small_world):
    @do
    def prog():
        yield call_io(Caller.PROG, IoOp.OPENFILE, ("/temp/a.txt", (), 0))
        return 0

    first = run(prog(), small_world)
    seeded = interpret(prog(), small_world, stateless_mstate(), seed_history=first.local)
    assert seeded.history == tuple(reversed(seeded.local)) + first.history


def test_unmediated_ctx_call_rejected(small_world):
    comp = call_io(Caller.CTX, IoOp.OPENFILE, ("/temp/a.txt", (), 0))
    with pytest.raises(CapabilityError):
        run(comp, small_world)


def test_do_reuses_fresh_generators():
    calls = []

    @do
    def prog():
        calls.append(1)
        r = yield ret(1)
        return r + 1

    comp = prog()
    w = make_world()
    assert run(comp, w).result == 2
    assert run(comp, w).result == 2
    assert len(calls) == 2
