"""Compiler mappings from C11 atomics to Power / ARMv7 instruction sequences.

A mapping is a table ``(kind, order) -> template`` where a template is a
list of ISA mnemonics; ``ld`` / ``st`` stand for the access itself and keep
its location, value and destination register.  ``cmp; bc; isync`` and
``teq; beq; isb`` are written as the single pseudo-fences ``ctrlisync`` /
``ctrlisb``.  Relaxed accesses map to a bare ``ld`` / ``st`` in every table.

Tables round-trip through a small text format::

    mapping trailing-sync-power arch power
    map load acquire -> ld; ctrlisync
    map store seq_cst -> lwsync; st; sync
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Union

from .litmus import (
    LOAD_ORDERS,
    STORE_ORDERS,
    C11Op,
    FenceKind,
    IsaOp,
    LitmusTest,
    MemoryOrder,
    Thread,
)

_FENCES = {f.value for f in FenceKind}


class MappingError(ValueError):
    pass


@dataclass(frozen=True)
class MappingTable:
    name: str
    arch: str
    family: str
    rules: tuple  # (((kind, MemoryOrder), (mnemonic, ...)), ...)

    def rule(self, kind: str, order: MemoryOrder) -> tuple:
        for key, template in self.rules:
            if key == (kind, order):
                return template
        raise MappingError(f"mapping {self.name} has no rule for {kind} {order}")

    @property
    def rule_map(self) -> dict:
        return dict(self.rules)

    def render(self) -> str:
        lines = [f"mapping {self.name} arch {self.arch}"]
        for (kind, order), template in self.rules:
            lines.append(f"map {kind} {order} -> {'; '.join(template)}")
        return "\n".join(lines) + "\n"


def _table(name: str, arch: str, family: str, **rules: str) -> MappingTable:
    parsed = []
    for key, text in rules.items():
        kind, order = key.split("_", 1)
        parsed.append(((kind, MemoryOrder(order)), tuple(s.strip() for s in text.split(";"))))
    return MappingTable(name, arch, family, tuple(parsed))


LEADING_SYNC_POWER = _table(
    "leading-sync-power", "power", "leading-sync",
    load_relaxed="ld",
    load_acquire="ld; ctrlisync",
    load_seq_cst="sync; ld; ctrlisync",
    store_relaxed="st",
    store_release="lwsync; st",
    store_seq_cst="sync; st",
)

LEADING_SYNC_ARMV7 = _table(
    "leading-sync-armv7", "armv7", "leading-sync",
    load_relaxed="ld",
    load_acquire="ld; ctrlisb",
    load_seq_cst="dmbish; ld; ctrlisb",
    store_relaxed="st",
    store_release="dmbish; st",
    store_seq_cst="dmbish; st",
)

TRAILING_SYNC_POWER = _table(
    "trailing-sync-power", "power", "trailing-sync",
    load_relaxed="ld",
    load_acquire="ld; ctrlisync",
    load_seq_cst="ld; sync",
    store_relaxed="st",
    store_release="lwsync; st",
    store_seq_cst="lwsync; st; sync",
)

TRAILING_SYNC_ARMV7 = _table(
    "trailing-sync-armv7", "armv7", "trailing-sync",
    load_relaxed="ld",
    load_acquire="ld; ctrlisb",
    load_seq_cst="ld; dmbish",
    store_relaxed="st",
    store_release="dmbish; st",
    store_seq_cst="dmbish; st; dmbish",
)

# What GCC and Clang emit for ARMv7: trailing-sync, but acquire loads are
# followed by a full barrier instead of ctrlisb.
GCC_ARMV7 = _table(
    "gcc-armv7", "armv7", "gcc-armv7",
    load_relaxed="ld",
    load_acquire="ld; dmbish",
    load_seq_cst="ld; dmbish",
    store_relaxed="st",
    store_release="dmbish; st",
    store_seq_cst="dmbish; st; dmbish",
)

_CATALOG = (
    LEADING_SYNC_POWER,
    LEADING_SYNC_ARMV7,
    TRAILING_SYNC_POWER,
    TRAILING_SYNC_ARMV7,
    GCC_ARMV7,
)


def mapping_catalog() -> list:
    return list(_CATALOG)


def parse_mapping(text: str) -> MappingTable:
    name = arch = None
    rules = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "mapping":
            if len(words) != 4 or words[2] != "arch":
                raise MappingError(f"line {lineno}: expected 'mapping <name> arch <arch>'")
            name, arch = words[1], words[3]
            if arch not in ("power", "armv7"):
                raise MappingError(f"line {lineno}: unknown arch {arch!r}")
            continue
        if words[0] != "map" or "->" not in line:
            raise MappingError(f"line {lineno}: expected 'map <kind> <order> -> <ops>'")
        head, body = line.split("->", 1)
        head_words = head.split()
        if len(head_words) != 3 or head_words[1] not in ("load", "store"):
            raise MappingError(f"line {lineno}: expected 'map <load|store> <order>'")
        try:
            order = MemoryOrder(head_words[2])
        except ValueError:
            raise MappingError(f"line {lineno}: unknown order {head_words[2]!r}") from None
        valid = LOAD_ORDERS if head_words[1] == "load" else STORE_ORDERS
        if order not in valid:
            raise MappingError(f"line {lineno}: a {head_words[1]} cannot be {order}")
        template = tuple(s.strip() for s in body.split(";") if s.strip())
        access = "ld" if head_words[1] == "load" else "st"
        if template.count(access) != 1 or any(
            m not in _FENCES and m != access for m in template
        ):
            raise MappingError(
                f"line {lineno}: template must contain exactly one {access!r} plus fences"
            )
        key = (head_words[1], order)
        if key in seen:
            raise MappingError(f"line {lineno}: duplicate rule for {head_words[1]} {order}")
        seen.add(key)
        rules.append((key, template))
    if name is None:
        raise MappingError("missing 'mapping <name> arch <arch>' header")
    return MappingTable(name, arch, "custom", tuple(rules))


def get_mapping(ref: Union[str, MappingTable]) -> MappingTable:
    """Look up a built-in mapping by name, or load one from a file path."""
    if isinstance(ref, MappingTable):
        return ref
    for table in _CATALOG:
        if table.name == ref:
            return table
    if os.path.exists(ref):
        with open(ref, encoding="utf-8") as fh:
            return parse_mapping(fh.read())
    names = ", ".join(t.name for t in _CATALOG)
    raise MappingError(f"unknown mapping {ref!r} (built-ins: {names})")


def _expand(op: C11Op, template: tuple) -> list:
    out = []
    for mnemonic in template:
        if mnemonic == "ld":
            out.append(IsaOp("ld", op.location, dest=op.dest))
        elif mnemonic == "st":
            out.append(IsaOp("st", op.location, value=op.value))
        else:
            out.append(IsaOp("fence", fence=FenceKind(mnemonic)))
    return out


def compile_test(test: LitmusTest, table: Union[str, MappingTable]) -> LitmusTest:
    """Expand each C11 op in thread order; init and outcome carry over."""
    table = get_mapping(table)
    if test.level != "c11":
        raise MappingError(f"{test.name} is not a c11 test")
    threads = []
    for th in test.threads:
        ops = []
        for op in th.ops:
            ops.extend(_expand(op, table.rule(op.kind, op.order)))
        for prev, cur in zip((None,) + tuple(ops), ops):
            if cur.kind == "fence" and cur.fence.is_ctrl and (prev is None or prev.kind != "ld"):
                raise MappingError(f"{table.name}: {cur.fence} does not follow a load")
        threads.append(Thread(th.tid, tuple(ops)))
    return LitmusTest(
        name=f"{test.name}.{table.name}",
        level="isa",
        arch=table.arch,
        init=test.init,
        threads=tuple(threads),
        outcome=test.outcome,
        expectation=None,
    )

