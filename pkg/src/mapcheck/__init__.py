"""Validate C11 atomics compiler mappings to Power and ARMv7 on litmus tests."""

from .c11 import (
    batty_linearization_gap,
    c11_allows,
    check_coherence,
    compute_hb,
    compute_sw,
    find_sc_order,
    forced_sc_edges,
)
from .dot import emit_dot
from .executions import Execution, compute_fr, enumerate_executions, filter_outcome
from .harness import BugReport, Ok, Verdict, compare, run_corpus, sweep
from .hw import hw_allows, hw_consistent, hw_relations
from .litmus import (
    C11Op,
    Event,
    FenceKind,
    IsaOp,
    LitmusSyntaxError,
    LitmusTest,
    MemoryOrder,
    build_events,
    parse_litmus,
    render_litmus,
)
from .mapping import MappingTable, compile_test, get_mapping, mapping_catalog, parse_mapping
from .relation import Relation

__version__ = "0.1.0"
