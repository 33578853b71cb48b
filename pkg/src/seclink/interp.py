"""Deterministic interpreter: runs a computation tree against a world.

Alongside the world it maintains ghost state: the full event history and
the current monitor-state value, updated on every recorded event.  In check
mode (the default) it asserts after every step that the monitor state still
abstracts the history, and it audits the capability discipline: every
context-tagged IO call must have come through the secure library.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import worlds
from .effects import (
    GET_MSTATE,
    Call,
    Caller,
    Comp,
    Event,
    IoOp,
    Lazy,
    Ret,
    Trace,
)
from .monitor import MStateDesc, replay


class CapabilityError(AssertionError):
    """A context-tagged IO call bypassed the secure library."""


class GhostInvariantError(AssertionError):
    """The monitor state stopped abstracting the history."""


@dataclass
class RunResult:
    result: object
    world: worlds.World
    local: Trace  # chronological events of this run
    history: Trace  # reverse-chronological, includes any seeded history
    mstate: object
    ctx_events: int
    monitored_calls: int

    @property
    def audit_ok(self) -> bool:
        return self.ctx_events == self.monitored_calls


def interpret(
    comp: Comp,
    world: worlds.World,
    desc: MStateDesc,
    *,
    seed_history: tuple[Event, ...] = (),
    check: bool = True,
) -> RunResult:
    """Run `comp` to completion.  Pure in (comp, world, desc, seed_history).

    `seed_history` is a chronological event prefix replayed through the
    state-update function before the run starts; it lets tests probe
    mid-execution configurations.
    """
    w = world.clone()
    history = list(reversed(seed_history))  # most recent first
    local: list[Event] = []
    state = replay(desc, seed_history)
    ctx_events = 0
    monitored_calls = 0

    if check and not desc.abstracts(state, tuple(history)):
        raise GhostInvariantError("seeded state does not abstract seeded history")

    cur = comp
    while True:
        if isinstance(cur, Lazy):
            cur = cur.force()
            continue
        if isinstance(cur, Ret):
            return RunResult(
                result=cur.value,
                world=w,
                local=tuple(local),
                history=tuple(history),
                mstate=state,
                ctx_events=ctx_events,
                monitored_calls=monitored_calls,
            )
        if not isinstance(cur, Call):
            raise TypeError(f"not a computation: {cur!r}")

        if cur.op is GET_MSTATE:
            if check and not desc.abstracts(state, tuple(history)):
                raise GhostInvariantError("state does not abstract history at state read")
            cur = cur.cont(state)
            continue

        if not isinstance(cur.op, IoOp):
            raise TypeError(f"unknown operation {cur.op!r}")
        if cur.caller is Caller.CTX:
            if check and not cur.via_monitor:
                raise CapabilityError(
                    f"unmediated context call: {cur.op.value} {cur.arg!r}"
                )
            ctx_events += 1
        if cur.via_monitor:
            monitored_calls += 1

        arg = worlds.canon_arg(cur.op, cur.arg)
        result = worlds.step(w, cur.caller, cur.op, arg)
        event = Event(cur.caller, cur.op, arg, result)
        history.insert(0, event)
        local.append(event)
        state = desc.upd(state, event)
        if check and not desc.abstracts(state, tuple(history)):
            raise GhostInvariantError(
                f"state update broke the abstraction after {event.render()}"
            )
        cur = cur.cont(result)
