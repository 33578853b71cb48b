"""Deterministic simulated world: an in-memory filesystem plus scripted sockets.

The world is the single source of IO outcomes, chosen so that every run is
a pure function of the starting world:

- descriptors are never reused within a run;
- reads return the whole pending buffer (files: cursor to end; sockets:
  the full scripted request);
- `Select` reports the lowest-numbered ready descriptor;
- all failures are in-band `Err` results, never exceptions.

Scenario files describe starting worlds as JSON:
``{"files": {path: base64}, "requests": [{"client_id": int,
"raw_request_bytes": base64}], "max_iterations": int}``.
"""

from __future__ import annotations

import base64
import copy
import json
from dataclasses import dataclass, field

from .effects import Caller, Err, ErrCode, IoOp, Ok, Result

STDOUT_FD = 1
_FIRST_FD = 3


@dataclass
class FileFd:
    path: str
    cursor: int
    owner: Caller


@dataclass
class SocketFd:
    owner: Caller
    bound: tuple[str, int] | None = None
    listening: bool = False


@dataclass
class ClientFd:
    client_id: int
    pending: bytes
    owner: Caller


@dataclass
class ConsoleFd:
    owner: Caller = Caller.PROG


@dataclass
class World:
    files: dict[str, bytes] = field(default_factory=dict)
    requests: list[tuple[int, bytes]] = field(default_factory=list)
    max_iterations: int = 8
    fds: dict[int, object] = field(default_factory=lambda: {STDOUT_FD: ConsoleFd()})
    next_fd: int = _FIRST_FD
    next_request: int = 0
    # Bytes written per descriptor; survives close so runs can be inspected.
    written: dict[int, bytes] = field(default_factory=dict)

    def clone(self) -> "World":
        return copy.deepcopy(self)

    def client_fds(self) -> list[int]:
        return [fd for fd, e in self.fds.items() if isinstance(e, ClientFd)]


def make_world(files=None, requests=None, max_iterations=8) -> World:
    return World(
        files=dict(files or {}),
        requests=[(int(cid), bytes(raw)) for cid, raw in (requests or [])],
        max_iterations=max_iterations,
    )


class ScenarioError(ValueError):
    pass


def load_scenario(text: str) -> World:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    files = data.get("files", {})
    if not isinstance(files, dict):
        raise ScenarioError('"files" must map paths to base64 content')
    decoded_files = {}
    for path, content in files.items():
        try:
            decoded_files[str(path)] = base64.b64decode(content, validate=True)
        except Exception as exc:
            raise ScenarioError(f"file {path!r}: bad base64 content") from exc
    requests = data.get("requests", [])
    if not isinstance(requests, list):
        raise ScenarioError('"requests" must be a list')
    decoded_requests = []
    for i, req in enumerate(requests):
        if not isinstance(req, dict) or "client_id" not in req or "raw_request_bytes" not in req:
            raise ScenarioError(f"request {i}: need client_id and raw_request_bytes")
        try:
            raw = base64.b64decode(req["raw_request_bytes"], validate=True)
        except Exception as exc:
            raise ScenarioError(f"request {i}: bad base64 bytes") from exc
        decoded_requests.append((int(req["client_id"]), raw))
    max_iterations = data.get("max_iterations", 8)
    if not isinstance(max_iterations, int) or max_iterations < 0:
        raise ScenarioError('"max_iterations" must be a non-negative integer')
    return make_world(decoded_files, decoded_requests, max_iterations)


def dump_scenario(world: World) -> str:
    return json.dumps(
        {
            "files": {p: base64.b64encode(c).decode("ascii") for p, c in world.files.items()},
            "requests": [
                {"client_id": cid, "raw_request_bytes": base64.b64encode(raw).decode("ascii")}
                for cid, raw in world.requests
            ],
            "max_iterations": world.max_iterations,
        },
        indent=2,
    )


def _alloc(world: World, entry) -> int:
    fd = world.next_fd
    world.next_fd += 1
    world.fds[fd] = entry
    return fd


def canon_arg(op: IoOp, arg):
    """Normalise an op argument to its canonical hashable form."""
    if op is IoOp.OPENFILE:
        if isinstance(arg, str):
            return (arg, (), 0)
        path, flags, mode = arg
        return (str(path), tuple(flags), int(mode))
    if op is IoOp.WRITE:
        fd, data = arg
        return (int(fd), bytes(data))
    if op in (IoOp.READ, IoOp.CLOSE, IoOp.ACCEPT, IoOp.SETNONBLOCK):
        return int(arg)
    if op is IoOp.SOCKET:
        return ()
    if op is IoOp.SETSOCKOPT:
        fd, name, value = arg
        return (int(fd), str(name), value)
    if op is IoOp.BIND:
        fd, host, port = arg
        return (int(fd), str(host), int(port))
    if op is IoOp.LISTEN:
        fd, backlog = arg
        return (int(fd), int(backlog))
    if op is IoOp.SELECT:
        return tuple(int(fd) for fd in arg)
    raise ValueError(f"unknown op {op!r}")


def step(world: World, caller: Caller, op: IoOp, arg) -> Result:
    """Apply one IO operation to the world and return its in-band result."""
    if op is IoOp.OPENFILE:
        path, flags, _mode = arg
        if path not in world.files:
            if "O_CREAT" in flags:
                world.files[path] = b""
            else:
                return Err(ErrCode.ENOENT)
        return Ok(_alloc(world, FileFd(path, 0, caller)))

    if op is IoOp.SOCKET:
        return Ok(_alloc(world, SocketFd(caller)))

    if op is IoOp.SETSOCKOPT:
        fd = arg[0]
        return Ok(()) if isinstance(world.fds.get(fd), SocketFd) else Err(ErrCode.EBADF)

    if op is IoOp.BIND:
        fd, host, port = arg
        entry = world.fds.get(fd)
        if not isinstance(entry, SocketFd):
            return Err(ErrCode.EBADF)
        entry.bound = (host, port)
        return Ok(())

    if op is IoOp.LISTEN:
        fd = arg[0]
        entry = world.fds.get(fd)
        if not isinstance(entry, SocketFd):
            return Err(ErrCode.EBADF)
        entry.listening = True
        return Ok(())

    if op is IoOp.SETNONBLOCK:
        fd = arg
        if fd not in world.fds:
            return Err(ErrCode.EBADF)
        return Ok(())

    if op is IoOp.ACCEPT:
        fd = arg
        entry = world.fds.get(fd)
        if not isinstance(entry, SocketFd) or not entry.listening:
            return Err(ErrCode.EBADF)
        if world.next_request >= len(world.requests):
            return Err(ErrCode.EWOULDBLOCK)
        client_id, raw = world.requests[world.next_request]
        world.next_request += 1
        return Ok(_alloc(world, ClientFd(client_id, raw, caller)))

    if op is IoOp.SELECT:
        ready = [
            fd
            for fd in sorted(arg)
            if isinstance(world.fds.get(fd), ClientFd) and world.fds[fd].pending
        ]
        if not ready:
            return Err(ErrCode.EWOULDBLOCK)
        return Ok(ready[0])

    if op is IoOp.READ:
        fd = arg
        entry = world.fds.get(fd)
        if isinstance(entry, FileFd):
            content = world.files.get(entry.path, b"")
            data = content[entry.cursor :]
            entry.cursor = len(content)
            return Ok(data)
        if isinstance(entry, ClientFd):
            if not entry.pending:
                return Err(ErrCode.EWOULDBLOCK)
            data, entry.pending = entry.pending, b""
            return Ok(data)
        return Err(ErrCode.EBADF)

    if op is IoOp.WRITE:
        fd, data = arg
        entry = world.fds.get(fd)
        if entry is None or isinstance(entry, SocketFd):
            return Err(ErrCode.EBADF)
        if isinstance(entry, FileFd):
            world.files[entry.path] = world.files.get(entry.path, b"") + data
            entry.cursor = len(world.files[entry.path])
        world.written[fd] = world.written.get(fd, b"") + data
        return Ok(())

    if op is IoOp.CLOSE:
        fd = arg
        if fd not in world.fds or isinstance(world.fds[fd], ConsoleFd):
            return Err(ErrCode.EBADF)
        del world.fds[fd]
        return Ok(())

    raise ValueError(f"unknown op {op!r}")


def render_trace(events) -> str:
    return "\n".join(e.render() for e in events)
