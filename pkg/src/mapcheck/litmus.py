"""Litmus tests at the C11 and ISA level, their text format, and events.

Text format (``#`` starts a comment that runs to end of line)::

    c11 test IRIW-acq-acq
    init x=0 y=0
    thread T0 { store(x, 1, seq_cst) }
    thread T2 {
      r1 = load(x, acquire)
      r2 = load(y, seq_cst)
    }
    forbidden r1=1 /\\ r2=0

ISA tests use the header ``isa test <name> arch <power|armv7>`` and the ops
``r1 = ld x``, ``st x = 1``, ``sync``, ``lwsync``, ``dmbish``, ``ctrlisync``
and ``ctrlisb``.  Ops inside a thread are separated by ``;`` or newlines.
The final line is ``forbidden``, ``allowed`` or ``outcome`` (no expectation)
followed by ``/\\``-joined equalities over registers ``r<k>`` and locations.
"""

from __future__ import annotations

import enum
import re
import string
from dataclasses import dataclass, field
from typing import Optional, Union

from .relation import Relation

INIT_THREAD = -1


class MemoryOrder(str, enum.Enum):
    RELAXED = "relaxed"
    ACQUIRE = "acquire"
    RELEASE = "release"
    SEQ_CST = "seq_cst"

    def __str__(self) -> str:
        return self.value


class FenceKind(str, enum.Enum):
    SYNC = "sync"
    LWSYNC = "lwsync"
    DMBISH = "dmbish"
    CTRLISYNC = "ctrlisync"
    CTRLISB = "ctrlisb"

    def __str__(self) -> str:
        return self.value

    @property
    def is_ctrl(self) -> bool:
        return self in (FenceKind.CTRLISYNC, FenceKind.CTRLISB)

    @property
    def is_full(self) -> bool:
        return self in (FenceKind.SYNC, FenceKind.DMBISH)


LOAD_ORDERS = frozenset({MemoryOrder.RELAXED, MemoryOrder.ACQUIRE, MemoryOrder.SEQ_CST})
STORE_ORDERS = frozenset({MemoryOrder.RELAXED, MemoryOrder.RELEASE, MemoryOrder.SEQ_CST})


@dataclass(frozen=True)
class C11Op:
    kind: str  # "load" | "store"
    location: str
    order: MemoryOrder
    value: Optional[int] = None
    dest: Optional[str] = None

    def __post_init__(self):
        if self.kind == "load" and self.order not in LOAD_ORDERS:
            raise ValueError(f"load cannot be {self.order}")
        if self.kind == "store" and self.order not in STORE_ORDERS:
            raise ValueError(f"store cannot be {self.order}")

    @property
    def is_access(self) -> bool:
        return True

    def render(self) -> str:
        if self.kind == "load":
            return f"{self.dest} = load({self.location}, {self.order})"
        return f"store({self.location}, {self.value}, {self.order})"


@dataclass(frozen=True)
class IsaOp:
    kind: str  # "ld" | "st" | "fence"
    location: Optional[str] = None
    value: Optional[int] = None
    dest: Optional[str] = None
    fence: Optional[FenceKind] = None

    @property
    def is_access(self) -> bool:
        return self.kind != "fence"

    def render(self) -> str:
        if self.kind == "ld":
            return f"{self.dest} = ld {self.location}"
        if self.kind == "st":
            return f"st {self.location} = {self.value}"
        return str(self.fence)


Op = Union[C11Op, IsaOp]


@dataclass(frozen=True)
class Thread:
    tid: str
    ops: tuple


@dataclass(frozen=True)
class LitmusTest:
    name: str
    level: str  # "c11" | "isa"
    init: tuple  # ((loc, value), ...) in declaration order
    threads: tuple  # (Thread, ...)
    outcome: tuple  # ((name, value), ...)
    expectation: Optional[str] = None  # "forbidden" | "allowed" | None
    arch: Optional[str] = None  # isa only

    @property
    def init_map(self) -> dict:
        return dict(self.init)

    def registers(self) -> dict:
        """Register name -> (thread index, op index)."""
        regs = {}
        for ti, th in enumerate(self.threads):
            for oi, op in enumerate(th.ops):
                if op.is_access and op.dest is not None:
                    regs[op.dest] = (ti, oi)
        return regs

    def locations(self) -> list:
        return [loc for loc, _ in self.init]

    def thread_index(self, tid: str) -> int:
        for i, th in enumerate(self.threads):
            if th.tid == tid:
                return i
        raise KeyError(tid)


@dataclass(frozen=True)
class Event:
    id: int
    thread: int
    index: int
    kind: str  # "R" | "W" | "F"
    location: Optional[str] = None
    value: Optional[int] = None  # writes only; reads observe values via rf
    order: Optional[MemoryOrder] = None
    fence: Optional[FenceKind] = None
    dest: Optional[str] = None
    is_init: bool = False
    label: str = field(default="", compare=False)

    @property
    def is_read(self) -> bool:
        return self.kind == "R"

    @property
    def is_write(self) -> bool:
        return self.kind == "W"

    @property
    def is_fence(self) -> bool:
        return self.kind == "F"

    @property
    def is_sc(self) -> bool:
        return self.order is MemoryOrder.SEQ_CST

    def describe(self, value: Optional[int] = None) -> str:
        """``kind loc=val [order]`` text used in reports and DOT labels."""
        if self.is_fence:
            return f"F {self.fence}"
        shown = self.value if value is None else value
        text = f"{self.kind} {self.location}"
        if shown is not None:
            text += f"={shown}"
        if self.order is not None:
            text += f" [{self.order}]"
        return text


class LitmusSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


# --- parsing ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>\#[^\n]*)|(?P<nl>\n)"
    r"|(?P<num>\d+)(?![A-Za-z_])"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_.+\-]*)"
    r"|(?P<conj>/\\)|(?P<arrow>->)"
    r"|(?P<punct>[{}();,=])"
)
_REGISTER_RE = re.compile(r"r\d+\Z")
_LOCATION_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    toks = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LitmusSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        if kind == "nl":
            toks.append(_Tok("nl", "\n", line, pos - line_start + 1))
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    # token helpers
    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def advance(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.peek()
        return LitmusSyntaxError(msg, tok.line, tok.col)

    def skip_newlines(self):
        while self.peek().kind == "nl":
            self.advance()

    def expect(self, kind: str, text: Optional[str] = None) -> _Tok:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            got = tok.text or tok.kind
            raise self.error(f"expected {want!r}, got {got!r}")
        return self.advance()

    def expect_name(self, what: str) -> _Tok:
        tok = self.peek()
        if tok.kind != "name":
            raise self.error(f"expected {what}, got {tok.text or tok.kind!r}")
        return self.advance()

    def expect_int(self) -> int:
        return int(self.expect("num").text)

    def end_line(self):
        tok = self.peek()
        if tok.kind not in ("nl", "eof"):
            raise self.error(f"unexpected {tok.text!r}")
        self.skip_newlines()

    # grammar
    def parse(self) -> LitmusTest:
        self.skip_newlines()
        level_tok = self.expect_name("'c11' or 'isa'")
        if level_tok.text not in ("c11", "isa"):
            raise self.error("test must start with 'c11' or 'isa'", level_tok)
        level = level_tok.text
        self.expect("name", "test")
        name = self.expect_name("test name").text
        arch = None
        if level == "isa":
            self.expect("name", "arch")
            arch_tok = self.expect_name("architecture")
            if arch_tok.text not in ("power", "armv7"):
                raise self.error(f"unknown arch {arch_tok.text!r}", arch_tok)
            arch = arch_tok.text
        self.end_line()

        init: dict = {}
        init_toks: dict = {}
        if self.peek().kind == "name" and self.peek().text == "init":
            self.advance()
            while self.peek().kind == "name":
                loc_tok = self.advance()
                self._check_location(loc_tok)
                if loc_tok.text in init:
                    raise self.error(f"location {loc_tok.text!r} initialized twice", loc_tok)
                self.expect("punct", "=")
                init[loc_tok.text] = self.expect_int()
                init_toks[loc_tok.text] = loc_tok
            self.end_line()

        threads = []
        tids = set()
        while self.peek().kind == "name" and self.peek().text == "thread":
            th_tok = self.advance()
            tid_tok = self.peek()
            if tid_tok.kind not in ("name", "num"):
                raise self.error("expected thread id")
            self.advance()
            if tid_tok.text in tids:
                raise self.error(f"duplicate thread {tid_tok.text!r}", tid_tok)
            tids.add(tid_tok.text)
            ops = self.parse_block(level, th_tok)
            threads.append((tid_tok.text, ops))
            self.end_line()
        if not threads:
            raise self.error("no threads")

        exp_tok = self.expect_name("'forbidden', 'allowed' or 'outcome'")
        if exp_tok.text not in ("forbidden", "allowed", "outcome"):
            raise self.error(
                f"expected 'forbidden', 'allowed' or 'outcome', got {exp_tok.text!r}",
                exp_tok,
            )
        expectation = None if exp_tok.text == "outcome" else exp_tok.text
        outcome = [self.parse_eq()]
        while self.peek().kind == "conj":
            self.advance()
            outcome.append(self.parse_eq())
        self.end_line()
        if self.peek().kind != "eof":
            raise self.error(f"unexpected {self.peek().text!r} after outcome")

        return _assemble(name, level, arch, init, threads, outcome, expectation)

    def parse_block(self, level: str, th_tok: _Tok) -> list:
        self.expect("punct", "{")
        ops = []
        while True:
            while self.peek().kind == "nl" or self.peek().text == ";":
                self.advance()
            tok = self.peek()
            if tok.text == "}":
                self.advance()
                return ops
            if tok.kind == "eof":
                raise self.error("unterminated thread block", th_tok)
            op = self.parse_c11_op() if level == "c11" else self.parse_isa_op()
            ops.append((op, tok))
            nxt = self.peek()
            if nxt.kind != "nl" and nxt.text not in (";", "}"):
                raise self.error(f"expected ';' or newline, got {nxt.text!r}")

    def parse_c11_op(self) -> tuple:
        tok = self.expect_name("operation")
        if tok.text == "store":
            self.expect("punct", "(")
            loc = self.expect_name("location")
            self._check_location(loc)
            self.expect("punct", ",")
            value = self.expect_int()
            self.expect("punct", ",")
            order = self._order()
            self.expect("punct", ")")
            return ("store", loc.text, value, None, order)
        self._check_register(tok)
        self.expect("punct", "=")
        self.expect("name", "load")
        self.expect("punct", "(")
        loc = self.expect_name("location")
        self._check_location(loc)
        self.expect("punct", ",")
        order = self._order()
        self.expect("punct", ")")
        return ("load", loc.text, None, tok.text, order)

    def parse_isa_op(self) -> tuple:
        tok = self.expect_name("instruction")
        if tok.text in {f.value for f in FenceKind}:
            return ("fence", None, None, None, FenceKind(tok.text))
        if tok.text == "st":
            loc = self.expect_name("location")
            self._check_location(loc)
            self.expect("punct", "=")
            return ("st", loc.text, self.expect_int(), None, None)
        self._check_register(tok)
        self.expect("punct", "=")
        self.expect("name", "ld")
        loc = self.expect_name("location")
        self._check_location(loc)
        return ("ld", loc.text, None, tok.text, None)

    def parse_eq(self) -> tuple:
        tok = self.expect_name("register or location")
        self.expect("punct", "=")
        return (tok.text, self.expect_int(), tok)

    def _order(self) -> MemoryOrder:
        tok = self.expect_name("memory order")
        try:
            return MemoryOrder(tok.text)
        except ValueError:
            raise self.error(f"unknown memory order {tok.text!r}", tok) from None

    def _check_register(self, tok: _Tok):
        if not _REGISTER_RE.match(tok.text):
            raise self.error(f"expected register r<k> or operation, got {tok.text!r}", tok)

    def _check_location(self, tok: _Tok):
        if not _LOCATION_RE.match(tok.text) or _REGISTER_RE.match(tok.text):
            raise self.error(f"bad location name {tok.text!r}", tok)


def _assemble(name, level, arch, init, threads, outcome, expectation) -> LitmusTest:
    init = dict(init)
    regs: dict = {}
    written: dict = {}
    built = []
    for tid, raw_ops in threads:
        ops = []
        prev = None
        for (kind, loc, value, dest, extra), tok in raw_ops:
            if dest is not None:
                if dest in regs:
                    raise LitmusSyntaxError(f"duplicate register {dest!r}", tok.line, tok.col)
                regs[dest] = tok
            if loc is not None:
                init.setdefault(loc, 0)
            if value is not None:
                if value == init[loc] or value in written.get(loc, ()):
                    raise LitmusSyntaxError(
                        f"store value collision: {loc}={value} written twice",
                        tok.line,
                        tok.col,
                    )
                written.setdefault(loc, set()).add(value)
            if level == "c11":
                try:
                    op = C11Op(kind, loc, extra, value=value, dest=dest)
                except ValueError as exc:
                    raise LitmusSyntaxError(str(exc), tok.line, tok.col) from None
            else:
                op = IsaOp(kind, loc, value, dest, extra)
                if kind == "fence" and extra.is_ctrl and (prev is None or prev.kind != "ld"):
                    raise LitmusSyntaxError(
                        f"{extra} must immediately follow a load", tok.line, tok.col
                    )
            ops.append(op)
            prev = op
        built.append(Thread(tid, tuple(ops)))
    seen = set()
    for name_, _, tok in outcome:
        if name_ in seen:
            raise LitmusSyntaxError(f"{name_!r} constrained twice", tok.line, tok.col)
        seen.add(name_)
        if _REGISTER_RE.match(name_):
            if name_ not in regs:
                raise LitmusSyntaxError(f"unknown register {name_!r}", tok.line, tok.col)
        elif name_ not in init:
            raise LitmusSyntaxError(f"unknown location {name_!r}", tok.line, tok.col)
    return LitmusTest(
        name=name,
        level=level,
        arch=arch,
        init=tuple(init.items()),
        threads=tuple(built),
        outcome=tuple((n, v) for n, v, _ in outcome),
        expectation=expectation,
    )


def parse_litmus(text: str) -> LitmusTest:
    return _Parser(text).parse()


def load_litmus(path) -> LitmusTest:
    with open(path, encoding="utf-8") as fh:
        return parse_litmus(fh.read())


def render_litmus(test: LitmusTest) -> str:
    if test.level == "c11":
        lines = [f"c11 test {test.name}"]
    else:
        lines = [f"isa test {test.name} arch {test.arch}"]
    if test.init:
        lines.append("init " + " ".join(f"{loc}={val}" for loc, val in test.init))
    for th in test.threads:
        lines.append(f"thread {th.tid} {{")
        lines.extend(f"  {op.render()}" for op in th.ops)
        lines.append("}")
    keyword = test.expectation or "outcome"
    lines.append(keyword + " " + " /\\ ".join(f"{n}={v}" for n, v in test.outcome))
    return "\n".join(lines) + "\n"


def is_register(name: str) -> bool:
    return bool(_REGISTER_RE.match(name))


# --- events -----------------------------------------------------------------

def event_label(i: int) -> str:
    """a, b, ..., z, aa, ab, ... (the usual execution-diagram lettering)."""
    letters = string.ascii_lowercase
    out = ""
    i += 1
    while i:
        i, rem = divmod(i - 1, 26)
        out = letters[rem] + out
    return out


def build_events(test: LitmusTest) -> tuple:
    """Events of ``test`` and the (transitively closed) sb relation.

    Init writes come first, one per initialized location in declaration
    order, then each thread's ops in order.  Ids are dense from 0.
    """
    events = []
    for loc, val in test.init:
        eid = len(events)
        events.append(
            Event(
                eid, INIT_THREAD, 0, "W", loc, val,
                order=MemoryOrder.RELAXED if test.level == "c11" else None,
                is_init=True, label=event_label(eid),
            )
        )
    per_thread = []
    for ti, th in enumerate(test.threads):
        ids = []
        for oi, op in enumerate(th.ops):
            eid = len(events)
            events.append(_op_event(eid, ti, oi, op))
            ids.append(eid)
        per_thread.append(ids)
    sb = Relation()
    for ids in per_thread:
        sb = sb | Relation.from_order(ids)
    return tuple(events), sb


def _op_event(eid: int, ti: int, oi: int, op: Op) -> Event:
    label = event_label(eid)
    if isinstance(op, C11Op):
        if op.kind == "load":
            return Event(eid, ti, oi, "R", op.location, order=op.order, dest=op.dest, label=label)
        return Event(eid, ti, oi, "W", op.location, op.value, order=op.order, label=label)
    if op.kind == "ld":
        return Event(eid, ti, oi, "R", op.location, dest=op.dest, label=label)
    if op.kind == "st":
        return Event(eid, ti, oi, "W", op.location, op.value, label=label)
    return Event(eid, ti, oi, "F", fence=op.fence, label=label)
