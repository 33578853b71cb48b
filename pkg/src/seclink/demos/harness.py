"""Scenario harness: links a bundle with a context, runs it, checks verdicts.

A bundle packages one demo: its interface, trusted program, named contexts
(host-written and source-text ones), per-context expectations, and a set of
scripted worlds.  `run_scenario` executes one combination and returns a
structured report with one verdict per property.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from .. import ctxdsl
from ..contracts import import_value, make_checks_eff
from ..effects import Caller, IoOp, call_io, do, is_err
from ..interp import RunResult, interpret
from ..linker import (
    DualSourceInterface,
    SourceInterface,
    back_translate_ctx,
    back_translate_ctx_dual,
    compile_interface,
    compile_prog,
    compile_prog_dual,
    link_source,
    link_source_dual,
    link_target,
    link_target_dual,
)
from ..monitor import enforce_policy
from ..traces import enforced_locally, in_folder
from ..worlds import World, make_world
from . import logging_lib, webserver, ziplib
from .dsl_handlers import DSL_HANDLER_SOURCES

PROG_FIRST = "prog-first"
CTX_FIRST = "ctx-first"


@dataclass
class Bundle:
    name: str
    mode: str
    interface: SourceInterface | DualSourceInterface
    prog: Callable
    contexts: dict[str, Callable]
    worlds: list[World]
    expected_mechanism: dict[str, str | None] = field(default_factory=dict)
    dsl_sources: dict[str, str] = field(default_factory=dict)
    # when set, scenarios rebuild the program with the world's iteration cap
    prog_for_budget: Callable[[int], Callable] | None = None

    def context(self, name: str):
        """Resolve a context by name; `file:PATH` loads source text."""
        if name in self.contexts:
            return self.contexts[name]
        if name in self.dsl_sources:
            return self._translated(self.dsl_sources[name])
        if name.startswith("file:"):
            with open(name[5:], "r", encoding="utf-8") as handle:
                return self._translated(handle.read())
        raise KeyError(f"unknown context {name!r} for bundle {self.name}")

    def _translated(self, source: str):
        if self.mode != PROG_FIRST:
            raise ValueError("source-text contexts are supported for program-first bundles")
        ctype = compile_interface(self.interface).ctype
        return ctxdsl.load(source, ctype)

    def context_names(self) -> list[str]:
        return list(self.contexts) + list(self.dsl_sources)


@dataclass
class Report:
    bundle: str
    context: str
    world_index: int
    result: int
    run: RunResult
    verdicts: dict[str, bool]
    mechanism: str | None = None
    expected_mechanism: str | None = None

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())

    def render_text(self) -> str:
        lines = [f"bundle={self.bundle} context={self.context} world={self.world_index} result={self.result}"]
        for name, verdict in self.verdicts.items():
            lines.append(f"  [{'PASS' if verdict else 'FAIL'}] {name}")
        if self.expected_mechanism is not None or self.mechanism is not None:
            lines.append(f"  mechanism: {self.mechanism!r} (expected {self.expected_mechanism!r})")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(
            {
                "bundle": self.bundle,
                "context": self.context,
                "world": self.world_index,
                "result": self.result,
                "verdicts": self.verdicts,
                "mechanism": self.mechanism,
                "expected_mechanism": self.expected_mechanism,
                "trace": [e.render() for e in self.run.local],
            },
            indent=2,
        )


# ---------------------------------------------------------------------------
# Worlds
# ---------------------------------------------------------------------------

_INDEX = b"GET /index.html HTTP/1.1\r\n\r\n"
_MISSING = b"GET /nope.html HTTP/1.1\r\n\r\n"
_JUNK = b"junk\r\n"
_ESCAPE = b"GET /../etc/passwd HTTP/1.1\r\n\r\n"
_PAGES = {"/temp/index.html": b"<h1>hello</h1>", "/temp/a.txt": b"alpha", "/temp/b.txt": b"beta"}


def webserver_worlds() -> list[World]:
    reqs = [
        [],
        [(1, _INDEX)],
        [(1, _MISSING)],
        [(1, _JUNK)],
        [(1, _INDEX), (2, _MISSING), (3, _JUNK)],
        [(1, b"")],  # connects but never sends: nothing to select
        [(1, _ESCAPE)],
        [(i, _INDEX) for i in range(1, 9)],
        [(1, _JUNK), (2, _JUNK)],
        [(1, b"GET /a.txt HTTP/1.1\r\n\r\n"), (2, b"GET /b.txt HTTP/1.1\r\n\r\n")],
        [(1, _MISSING), (2, _INDEX), (3, b""), (4, _ESCAPE), (5, _INDEX)],
        [(i, _INDEX if i % 2 else _JUNK) for i in range(1, 7)],
    ]
    return [make_world(files=dict(_PAGES), requests=r, max_iterations=16) for r in reqs]


def logging_worlds() -> list[World]:
    return [
        make_world(files={"/temp/notes.txt": b"jot"}, requests=[]),
        make_world(files={}, requests=[]),
        make_world(files={"/temp/notes.txt": b""}, requests=[]),
    ]


def zip_worlds() -> list[World]:
    return [
        make_world(files={"/temp/in1.txt": b"payload"}, requests=[]),
        make_world(files={}, requests=[]),
        make_world(files={"/temp/in1.txt": b"x" * 64, "/temp/other.txt": b"y"}, requests=[]),
    ]


# ---------------------------------------------------------------------------
# Alternative policy available by name
# ---------------------------------------------------------------------------


def allow_all_in_tmp_spec(h, caller, op, arg) -> bool:
    """Laxer variant: the context may also write to its own files."""
    from ..traces import is_opened_by_ctx

    if caller is Caller.CTX:
        if op is IoOp.OPENFILE:
            return in_folder(arg[0], "/temp")
        if op in (IoOp.READ, IoOp.CLOSE):
            return is_opened_by_ctx(arg, h)
        if op is IoOp.WRITE:
            return is_opened_by_ctx(arg[0], h)
        return False
    return op is IoOp.WRITE


def allow_all_in_tmp_policy(s, op: IoOp, arg) -> bool:
    if op is IoOp.OPENFILE:
        return in_folder(arg[0], "/temp")
    if op in (IoOp.READ, IoOp.CLOSE):
        return arg in s.ctx_opened
    if op is IoOp.WRITE:
        return arg[0] in s.ctx_opened
    return False


def webserver_interface(policy: str = "webserver") -> SourceInterface:
    iface = webserver.interface()
    if policy == "webserver":
        return iface
    if policy == "allow_all_in_tmp":
        return SourceInterface(
            label="webserver+allow_all_in_tmp",
            ctype=iface.ctype,
            policy_spec=allow_all_in_tmp_spec,
            policy=allow_all_in_tmp_policy,
            cks=iface.cks,
            whole_run_post=iface.whole_run_post,
            mstate=iface.mstate,
        )
    raise KeyError(f"unknown policy {policy!r}")


# ---------------------------------------------------------------------------
# Bundles
# ---------------------------------------------------------------------------


def webserver_bundle(policy: str = "webserver") -> Bundle:
    return Bundle(
        name="webserver",
        mode=PROG_FIRST,
        interface=webserver_interface(policy),
        prog=webserver.make_server_prog(),
        contexts=dict(webserver.HANDLERS),
        worlds=webserver_worlds(),
        expected_mechanism=dict(webserver.EXPECTED_MECHANISM),
        dsl_sources=dict(DSL_HANDLER_SOURCES),
        prog_for_budget=webserver.make_server_prog,
    )


def logging_bundle() -> Bundle:
    return Bundle(
        name="logging",
        mode=CTX_FIRST,
        interface=logging_lib.interface(),
        prog=logging_lib.logger,
        contexts=dict(logging_lib.CONTEXTS),
        worlds=logging_worlds(),
    )


def zip_bundle(probe_closed_fd: bool = False) -> Bundle:
    return Bundle(
        name="zip",
        mode=PROG_FIRST,
        interface=ziplib.interface(),
        prog=ziplib.make_zip_prog(probe_closed_fd=probe_closed_fd),
        contexts=dict(ziplib.CONTEXTS),
        worlds=zip_worlds(),
    )


BUNDLES: dict[str, Callable[[], Bundle]] = {
    "webserver": webserver_bundle,
    "logging": logging_bundle,
    "zip": zip_bundle,
}


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


def link_whole(bundle: Bundle, ctx, *, route: str = "target", prog=None):
    """Build the whole computation via the requested linking route."""
    iface = bundle.interface
    prog = prog if prog is not None else bundle.prog
    if bundle.mode == PROG_FIRST:
        if route == "target":
            compiled = compile_prog(iface, prog)
            return link_target(compile_interface(iface), compiled, ctx)
        _whole_run_post, whole = link_source(iface, prog, back_translate_ctx(iface, ctx))
        return whole
    if route == "target":
        compiled = compile_prog_dual(iface, prog)
        return link_target_dual(iface, compiled, ctx)
    _policy_spec, whole = link_source_dual(iface, prog, back_translate_ctx_dual(iface, ctx))
    return whole


def run_scenario(bundle: Bundle, context_name: str, world: World, world_index: int = 0) -> Report:
    ctx = bundle.context(context_name)
    prog = bundle.prog_for_budget(world.max_iterations) if bundle.prog_for_budget else None
    whole = link_whole(bundle, ctx, prog=prog)
    run = interpret(whole, world, bundle.interface.mstate)
    verdicts = {"capability-audit": run.audit_ok}
    if bundle.mode == PROG_FIRST:
        verdicts["whole-run-post"] = bundle.interface.whole_run_post((), run.result, run.local)
    verdicts["policy-locally-enforced"] = enforced_locally(
        bundle.interface.policy_spec if bundle.mode == CTX_FIRST else _ctx_only(bundle.interface.policy_spec),
        (),
        run.local,
    )
    report = Report(
        bundle=bundle.name,
        context=context_name,
        world_index=world_index,
        result=run.result,
        run=run,
        verdicts=verdicts,
    )
    if bundle.name == "webserver" and context_name in bundle.expected_mechanism:
        report.expected_mechanism = bundle.expected_mechanism[context_name]
        report.mechanism = attribute_mechanism(bundle.interface, ctx)
        report.verdicts["mechanism-attribution"] = _mechanism_matches(
            report.mechanism, report.expected_mechanism
        )
    return report


def _ctx_only(policy_spec):
    """Judge only untrusted-side events; the trusted side's are outside the
    policy's remit in program-first scenarios."""

    def weakened(h, caller, op, arg):
        return caller is Caller.PROG or policy_spec(h, caller, op, arg)

    return weakened


def _mechanism_matches(found: str | None, expected: str | None) -> bool:
    if expected is None:
        return found is None
    return found is not None and found.startswith(expected)


PROBE_WORLD = make_world(
    files=dict(_PAGES),
    requests=[(1, _INDEX)],
)


def attribute_mechanism(iface: SourceInterface, ctx) -> str | None:
    """Run one handler invocation directly and report which mechanism, if
    any, produced the contract failure."""
    lib = enforce_policy(iface.policy, iface.mstate)
    strong = import_value(iface.ctype, make_checks_eff(iface.cks), ctx(lib))
    if is_err(strong):
        return strong.why

    @do
    def probe():
        sock = yield call_io(Caller.PROG, IoOp.SOCKET, ())
        yield call_io(Caller.PROG, IoOp.BIND, (sock.value, "0.0.0.0", 3000))
        yield call_io(Caller.PROG, IoOp.LISTEN, (sock.value, 5))
        client = yield call_io(Caller.PROG, IoOp.ACCEPT, sock.value)
        request = yield call_io(Caller.PROG, IoOp.READ, client.value)
        outcome = yield strong.value(client.value, request.value, webserver._send_to(client.value))
        return outcome

    outcome = interpret(probe(), PROBE_WORLD, iface.mstate).result
    return outcome.why if is_err(outcome) else None
