"""Executable trace predicates and whole-program behaviours.

A policy specification judges one prospective event against the history so
far; `enforced_locally` folds it over a local trace.  Global properties
like `every_request_gets_a_response` judge complete local traces.  `beh`
collects the (trace, result) behaviour of a computation over a sample of
worlds, and `satisfies` checks a behaviour against a post-condition.

Histories are reverse-chronological; local traces are chronological.
"""

from __future__ import annotations

import posixpath
from typing import Any, Callable, Iterable

from .effects import Caller, Event, IoOp, Trace, is_ok

# (history, caller, op, arg) -> allowed?
PolicySpec = Callable[[Trace, Caller, IoOp, Any], bool]
# (history, result, local trace) -> acceptable?
PostCond = Callable[[Trace, Any, Trace], bool]
# (local trace, result) -> member of the behaviour?
TraceProperty = Callable[[Trace, int], bool]


def enforced_locally(policy_spec: PolicySpec, h: Trace, lt: Iterable[Event]) -> bool:
    """Every event of `lt` satisfies `policy_spec` against the history it saw."""
    hist = list(h)
    for e in lt:
        if not policy_spec(tuple(hist), e.caller, e.op, e.arg):
            return False
        hist.insert(0, e)
    return True


def every_request_gets_a_response(lt: Iterable[Event]) -> bool:
    """Each descriptor the trusted side successfully read from is later
    written to.

    A request is a successful trusted-side read; a response is any write to
    the same descriptor.  Reads accumulate their descriptor, any write
    discharges all pending occurrences of its descriptor, and the
    accumulator must be empty at the end.  Failed reads and untrusted-side
    reads (a plugin paging through its own files) carry no obligation.
    """
    read_fds: list[int] = []
    for e in lt:
        if e.op is IoOp.READ and e.caller is Caller.PROG and is_ok(e.result):
            read_fds.append(e.arg)
        elif e.op is IoOp.WRITE:
            fd = e.arg[0]
            read_fds = [x for x in read_fds if x != fd]
    return not read_fds


def beh(comp, worlds_sample, desc, *, check: bool = True) -> frozenset:
    """Behaviour of `comp` over a world sample: {(local trace, result)}."""
    from .interp import interpret  # deferred: monitor state types sit between us

    out = set()
    for w in worlds_sample:
        run = interpret(comp, w, desc, check=check)
        out.add((run.local, run.result))
    return frozenset(out)


def satisfies(behavior, whole_run_post: PostCond) -> bool:
    """Every behaviour pair meets `whole_run_post` starting from the empty history."""
    return all(whole_run_post((), result, lt) for lt, result in behavior)


def in_folder(path: str, folder: str) -> bool:
    """True when the normalised path sits strictly inside `folder`."""
    norm = posixpath.normpath(path)
    return norm.startswith(folder.rstrip("/") + "/")


def is_open(fd: int, h: Trace) -> bool:
    """Descriptor open according to the history, regardless of opener."""
    return _opener(fd, h) is not None


def is_opened_by_ctx(fd: int, h: Trace) -> bool:
    return _opener(fd, h) is Caller.CTX


def is_opened_by_prog(fd: int, h: Trace) -> bool:
    return _opener(fd, h) is Caller.PROG


def _opener(fd: int, h: Trace) -> Caller | None:
    # Scan from most recent: a successful close ends the descriptor's life,
    # a successful allocation (open/socket/accept) reveals its owner.
    for e in h:
        if e.op is IoOp.CLOSE and is_ok(e.result) and e.arg == fd:
            return None
        if e.op in (IoOp.OPENFILE, IoOp.SOCKET, IoOp.ACCEPT) and is_ok(e.result):
            if e.result.value == fd:
                return e.caller
    return None


def did_not_respond(h: Trace) -> bool:
    """No trusted-side write since the most recent successful read."""
    for e in h:
        if e.op is IoOp.WRITE and e.caller is Caller.PROG:
            return False
        if e.op is IoOp.READ and is_ok(e.result):
            return True
    return True


def wrote_to(fd: int, events: Iterable[Event]) -> bool:
    """Some write (any caller, any outcome) targeted `fd`."""
    return any(e.op is IoOp.WRITE and e.arg[0] == fd for e in events)
