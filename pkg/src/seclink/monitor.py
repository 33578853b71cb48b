"""Monitor states, state-level policies, and the secure IO library.

A monitor-state descriptor picks a summary of the history (the carrier),
says what it means for a summary to be faithful (`abstracts`), and how to
maintain it per event (`upd`).  Two laws make a descriptor usable, both
checked by the test suite rather than proven:

- the initial state abstracts the empty history;
- if a state abstracts a history, the updated state abstracts the
  extended history, for every event.

A policy decides IO requests from untrusted code using only the monitor
state; its soundness obligation is that acceptance implies the trace-level
specification on every history the state abstracts.  `enforce_policy`
packages a policy as the one handle untrusted code gets for doing IO.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Callable, Generic, Iterable, TypeVar

from .effects import (
    Caller,
    Comp,
    Event,
    IoOp,
    Ret,
    bind,
    call_io,
    contract_failure,
    get_mstate,
    is_ok,
)
from .worlds import canon_arg

S = TypeVar("S")


@dataclass(frozen=True)
class MStateDesc(Generic[S]):
    name: str
    init: S
    abstracts: Callable[[S, tuple[Event, ...]], bool]
    upd: Callable[[S, Event], S]


def replay(desc: MStateDesc, events: Iterable[Event]):
    """Fold the update function over a chronological event sequence."""
    state = desc.init
    for e in events:
        state = desc.upd(state, e)
    return state


# (state, op, arg) -> allow?
Policy = Callable[[Any, IoOp, Any], bool]


@dataclass(frozen=True)
class SecureIoLib:
    """The only IO capability handed to untrusted code.

    Each call consults the policy against the current monitor state.  An
    allowed call performs exactly one context-tagged operation; a denied
    call returns a contract failure and leaves trace and state untouched.
    """

    policy: Policy
    desc: MStateDesc

    def call(self, op: IoOp, arg) -> Comp:
        arg = canon_arg(op, arg)

        def decide(state):
            if self.policy(state, op, arg):
                return call_io(Caller.CTX, op, arg, via_monitor=True)
            return Ret(contract_failure(f"policy:{op.value}"))

        return bind(get_mstate(), decide)


def enforce_policy(policy: Policy, desc: MStateDesc) -> SecureIoLib:
    return SecureIoLib(policy, desc)


# ---------------------------------------------------------------------------
# Shipped monitor states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WebServerState:
    """Summary for the web-server policy: context-opened descriptors, the
    responded-to-latest-request flag, and every descriptor ever written."""

    ctx_opened: tuple[int, ...] = ()
    responded: bool = False
    written: tuple[int, ...] = ()


def _ws_abstracts(s: WebServerState, h) -> bool:
    """Single chronological pass computing the same sets the per-descriptor
    trace oracles (is_opened_by_ctx, did_not_respond, wrote_to) describe."""
    owner: dict[int, Caller] = {}
    written: set[int] = set()
    responded = False
    for e in reversed(h):
        if e.op in (IoOp.OPENFILE, IoOp.SOCKET, IoOp.ACCEPT) and is_ok(e.result):
            owner[e.result.value] = e.caller
        elif e.op is IoOp.CLOSE and is_ok(e.result):
            owner.pop(e.arg, None)
        if e.op is IoOp.READ and is_ok(e.result):
            responded = False
        elif e.op is IoOp.WRITE:
            written.add(e.arg[0])
            if e.caller is Caller.PROG:
                responded = True
    ctx_opened = {fd for fd, caller in owner.items() if caller is Caller.CTX}
    return (
        set(s.ctx_opened) == ctx_opened
        and s.responded == responded
        and set(s.written) == written
    )


def _ws_upd(s: WebServerState, e: Event) -> WebServerState:
    if e.op in (IoOp.OPENFILE, IoOp.SOCKET, IoOp.ACCEPT) and is_ok(e.result):
        fd = e.result.value
        opened = tuple(x for x in s.ctx_opened if x != fd)
        if e.caller is Caller.CTX:
            opened += (fd,)
        s = replace(s, ctx_opened=opened)
    elif e.op is IoOp.CLOSE and is_ok(e.result):
        s = replace(s, ctx_opened=tuple(x for x in s.ctx_opened if x != e.arg))
    if e.op is IoOp.READ and is_ok(e.result):
        s = replace(s, responded=False)
    elif e.op is IoOp.WRITE:
        fd = e.arg[0]
        if e.caller is Caller.PROG:
            s = replace(s, responded=True)
        if fd not in s.written:
            s = replace(s, written=s.written + (fd,))
    return s


def webserver_mstate() -> MStateDesc[WebServerState]:
    return MStateDesc("webserver", WebServerState(), _ws_abstracts, _ws_upd)


def full_trace_mstate() -> MStateDesc[tuple[Event, ...]]:
    """The history itself, most recent first."""
    return MStateDesc(
        "full-trace",
        (),
        lambda s, h: s == tuple(h),
        lambda s, e: (e,) + s,
    )


def last_event_mstate() -> MStateDesc[Event | None]:
    return MStateDesc(
        "last-event",
        None,
        lambda s, h: s == (h[0] if h else None),
        lambda s, e: e,
    )


def stateless_mstate() -> MStateDesc[None]:
    return MStateDesc("stateless", None, lambda s, h: s is None, lambda s, e: None)


SHIPPED_MSTATES = {
    "webserver": webserver_mstate,
    "full-trace": full_trace_mstate,
    "last-event": last_event_mstate,
    "stateless": stateless_mstate,
}
