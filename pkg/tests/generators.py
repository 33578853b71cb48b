"""Seeded random generators shared by the property suites."""

from __future__ import annotations

import random

from seclink.effects import Caller, Err, ErrCode, Event, IoOp, Ok

PATHS = ("/temp/a.txt", "/temp/b.txt", "/etc/passwd")
FDS = (1, 3, 4, 5, 6, 7)
PAYLOADS = (b"", b"x", b"GET /a.txt HTTP/1.1\r\n\r\n", b"HTTP/1.1 200 OK\r\n\r\n")


def random_event(rng: random.Random) -> Event:
    op = rng.choice(
        (IoOp.OPENFILE, IoOp.READ, IoOp.WRITE, IoOp.CLOSE, IoOp.SOCKET, IoOp.ACCEPT, IoOp.SELECT)
    )
    caller = rng.choice((Caller.PROG, Caller.CTX))
    if op is IoOp.OPENFILE:
        arg = (rng.choice(PATHS), (), 0)
        result = rng.choice((Ok(rng.choice(FDS)), Err(ErrCode.ENOENT)))
    elif op is IoOp.READ:
        arg = rng.choice(FDS)
        result = rng.choice((Ok(rng.choice(PAYLOADS)), Err(ErrCode.EBADF)))
    elif op is IoOp.WRITE:
        arg = (rng.choice(FDS), rng.choice(PAYLOADS))
        result = rng.choice((Ok(()), Err(ErrCode.EBADF)))
    elif op is IoOp.CLOSE:
        arg = rng.choice(FDS)
        result = rng.choice((Ok(()), Err(ErrCode.EBADF)))
    elif op is IoOp.SOCKET:
        arg = ()
        result = Ok(rng.choice(FDS))
    elif op is IoOp.ACCEPT:
        arg = rng.choice(FDS)
        result = rng.choice((Ok(rng.choice(FDS)), Err(ErrCode.EWOULDBLOCK)))
    else:
        arg = tuple(sorted(rng.sample(FDS, rng.randrange(0, 3))))
        result = rng.choice((Ok(rng.choice(FDS)), Err(ErrCode.EWOULDBLOCK)))
    return Event(caller, op, arg, result)


def random_trace(rng: random.Random, max_len: int = 20) -> list[Event]:
    """Chronological event list."""
    return [random_event(rng) for _ in range(rng.randrange(0, max_len + 1))]
