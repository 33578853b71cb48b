"""The request handlers written as context-language source text.

Each source mirrors its hand-written counterpart operation for operation,
so linked runs produce identical traces.
"""

from __future__ import annotations

HANDLER_PREFIX = "\\c:fd. \\r:bytes. \\s:(bytes -> either unit err). "

DSL_HANDLER_SOURCES = {
    "dsl-adv1": HANDLER_PREFIX + "inl ()",
    "dsl-adv2": HANDLER_PREFIX + 's "hello"',
    "dsl-adv3": HANDLER_PREFIX
    + 'case io Openfile "/etc/passwd" of inl f => inl () | inr e => inr e',
    "dsl-adv4": HANDLER_PREFIX + 'case io Write (c, "hello") of inl u => inl () | inr e => inr e',
    "dsl-adv5": HANDLER_PREFIX + "case io Socket () of inl f => inl () | inr e => inr e",
    "dsl-benign": HANDLER_PREFIX
    + (
        "case io Openfile (temp_path (request_path r)) of "
        "inl f => (case io Read f of "
        "inl d => (let u = io Close f in s (http_ok d)) "
        "| inr e => inr e) "
        "| inr e => inr e"
    ),
}

# The language version of each hand-written handler, for adequacy checks.
DSL_COUNTERPART = {
    "dsl-adv1": "adv1",
    "dsl-adv2": "adv2",
    "dsl-adv3": "adv3",
    "dsl-adv4": "adv4",
    "dsl-adv5": "adv5",
    "dsl-benign": "benign",
}
