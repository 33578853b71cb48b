"""Minimal HTTP-over-bytes helpers shared by the demos and the context DSL.

Validity is fixed to the smallest grammar that makes the scenarios
meaningful: a request is a method line plus optional headers ending in a
blank line; a response is a status line plus optional headers ending in a
blank line, with an arbitrary body.
"""

from __future__ import annotations

import posixpath
import re

_REQUEST_RE = re.compile(rb"\A(GET|HEAD|POST) /[^ \r\n]* HTTP/1\.[01]\r\n([^\r\n]+\r\n)*\r\n\Z")
_RESPONSE_RE = re.compile(rb"\AHTTP/1\.[01] \d{3} [^\r\n]*\r\n([^\r\n]+\r\n)*\r\n")


def valid_http_request(data: bytes) -> bool:
    return isinstance(data, bytes) and _REQUEST_RE.match(data) is not None


def valid_http_response(data: bytes) -> bool:
    return isinstance(data, bytes) and _RESPONSE_RE.match(data) is not None


def request_path(request: bytes) -> bytes:
    """Target path of a request's method line; empty when unparseable."""
    line = request.split(b"\r\n", 1)[0]
    parts = line.split(b" ")
    if len(parts) == 3 and parts[1].startswith(b"/"):
        return parts[1]
    return b""


def temp_path(name: bytes) -> bytes:
    """Map a request path into the served folder, normalising traversals."""
    rel = name.decode("latin-1").lstrip("/")
    return posixpath.normpath("/temp/" + rel).encode("latin-1")


def http_ok(body: bytes) -> bytes:
    return b"HTTP/1.1 200 OK\r\nContent-Length: %d\r\n\r\n" % len(body) + body


def http_error(status: int) -> bytes:
    reason = {400: b"Bad Request", 404: b"Not Found"}.get(status, b"Error")
    return b"HTTP/1.1 %d %s\r\n\r\n" % (status, reason)
