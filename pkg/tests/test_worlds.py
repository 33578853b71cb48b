"""World semantics and scenario file handling."""

from __future__ import annotations

import pytest

from seclink.effects import Caller, Err, ErrCode, IoOp, Ok
from seclink.worlds import (
    ScenarioError,
    canon_arg,
    dump_scenario,
    load_scenario,
    make_world,
    step,
)

PROG = Caller.PROG
CTX = Caller.CTX


def test_openfile_missing():
    w = make_world()
    assert step(w, PROG, IoOp.OPENFILE, ("/temp/x", (), 0)) == Err(ErrCode.ENOENT)


def test_openfile_creates_with_flag():
    w = make_world()
    r = step(w, PROG, IoOp.OPENFILE, ("/temp/x", ("O_CREAT",), 0o644))
    assert isinstance(r, Ok)
    assert w.files["/temp/x"] == b""


def test_descriptors_never_reused():
    w = make_world(files={"/temp/a": b"x", "/temp/b": b"y"})
    fd1 = step(w, PROG, IoOp.OPENFILE, ("/temp/a", (), 0)).value
    assert step(w, PROG, IoOp.CLOSE, fd1) == Ok(())
    fd2 = step(w, PROG, IoOp.OPENFILE, ("/temp/b", (), 0)).value
    assert fd2 != fd1


def test_read_returns_whole_content_then_empty():
    w = make_world(files={"/temp/a": b"alpha"})
    fd = step(w, PROG, IoOp.OPENFILE, ("/temp/a", (), 0)).value
    assert step(w, PROG, IoOp.READ, fd) == Ok(b"alpha")
    assert step(w, PROG, IoOp.READ, fd) == Ok(b"")


def test_write_appends_and_read_after_write():
    w = make_world(files={"/temp/a": b"alpha"})
    fd = step(w, PROG, IoOp.OPENFILE, ("/temp/a", (), 0)).value
    assert step(w, PROG, IoOp.WRITE, (fd, b"-more")) == Ok(())
    assert w.files["/temp/a"] == b"alpha-more"


def test_closed_fd_operations_fail_in_band():
    w = make_world(files={"/temp/a": b"x"})
    fd = step(w, PROG, IoOp.OPENFILE, ("/temp/a", (), 0)).value
    step(w, PROG, IoOp.CLOSE, fd)
    assert step(w, PROG, IoOp.READ, fd) == Err(ErrCode.EBADF)
    assert step(w, PROG, IoOp.WRITE, (fd, b"z")) == Err(ErrCode.EBADF)
    assert step(w, PROG, IoOp.CLOSE, fd) == Err(ErrCode.EBADF)


def test_socket_lifecycle_and_accept_queue():
    w = make_world(requests=[(7, b"one"), (8, b"two")])
    s = step(w, PROG, IoOp.SOCKET, ()).value
    assert step(w, PROG, IoOp.SETSOCKOPT, (s, "SO_REUSEADDR", True)) == Ok(())
    assert step(w, PROG, IoOp.BIND, (s, "0.0.0.0", 3000)) == Ok(())
    assert step(w, PROG, IoOp.LISTEN, (s, 5)) == Ok(())
    c1 = step(w, PROG, IoOp.ACCEPT, s).value
    c2 = step(w, PROG, IoOp.ACCEPT, s).value
    assert c1 != c2
    assert step(w, PROG, IoOp.ACCEPT, s) == Err(ErrCode.EWOULDBLOCK)
    assert step(w, PROG, IoOp.READ, c1) == Ok(b"one")
    assert step(w, PROG, IoOp.READ, c1) == Err(ErrCode.EWOULDBLOCK)


def test_accept_requires_listening():
    w = make_world(requests=[(1, b"x")])
    s = step(w, PROG, IoOp.SOCKET, ()).value
    assert step(w, PROG, IoOp.ACCEPT, s) == Err(ErrCode.EBADF)


def test_select_picks_lowest_ready():
    w = make_world(requests=[(1, b"a"), (2, b"b"), (3, b"")])
    s = step(w, PROG, IoOp.SOCKET, ()).value
    step(w, PROG, IoOp.LISTEN, (s, 5))
    c1 = step(w, PROG, IoOp.ACCEPT, s).value
    c2 = step(w, PROG, IoOp.ACCEPT, s).value
    c3 = step(w, PROG, IoOp.ACCEPT, s).value
    assert step(w, PROG, IoOp.SELECT, (c2, c1)) == Ok(c1)
    step(w, PROG, IoOp.READ, c1)
    assert step(w, PROG, IoOp.SELECT, (c1, c2)) == Ok(c2)
    # empty scripted request: connected but nothing to read
    assert step(w, PROG, IoOp.SELECT, (c3,)) == Err(ErrCode.EWOULDBLOCK)


def test_client_writes_recorded():
    w = make_world(requests=[(1, b"req")])
    s = step(w, PROG, IoOp.SOCKET, ()).value
    step(w, PROG, IoOp.LISTEN, (s, 5))
    c = step(w, PROG, IoOp.ACCEPT, s).value
    step(w, PROG, IoOp.WRITE, (c, b"resp"))
    step(w, PROG, IoOp.CLOSE, c)
    assert w.written[c] == b"resp"


def test_canon_arg_shapes():
    assert canon_arg(IoOp.OPENFILE, "/temp/a") == ("/temp/a", (), 0)
    assert canon_arg(IoOp.OPENFILE, ("/temp/a", ["O_CREAT"], 0o644)) == ("/temp/a", ("O_CREAT",), 0o644)
    assert canon_arg(IoOp.WRITE, (3, bytearray(b"x"))) == (3, b"x")
    assert canon_arg(IoOp.SELECT, [5, 3]) == (5, 3)


def test_scenario_round_trip():
    w = make_world(
        files={"/temp/a": b"\x00\xffbin"},
        requests=[(1, b"GET / HTTP/1.1\r\n\r\n")],
        max_iterations=4,
    )
    again = load_scenario(dump_scenario(w))
    assert again.files == w.files
    assert again.requests == w.requests
    assert again.max_iterations == w.max_iterations


@pytest.mark.parametrize(
    "payload",
    [
        "[]",
        '{"files": []}',
        '{"requests": [{"client_id": 1}]}',
        '{"files": {"/a": "not base64!!"}}',
        '{"max_iterations": -1}',
        "not json",
    ],
)
def test_scenario_validation_errors(payload):
    with pytest.raises(ScenarioError):
        load_scenario(payload)
