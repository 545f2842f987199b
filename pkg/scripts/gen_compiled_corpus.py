"""Regenerate corpus/compiled/ from the C11 sources.

Expected hardware verdicts are written by hand below, not computed by the
model: the corpus test suite checks the model against them.
"""

import dataclasses
import pathlib

from mapcheck.corpus import load_sources
from mapcheck.litmus import render_litmus
from mapcheck.mapping import compile_test, mapping_catalog

F, A = "forbidden", "allowed"

# mapping order: leading-power, leading-armv7, trailing-power, trailing-armv7, gcc-armv7
EXPECTED = {
    # trailing-sync leaves only ctrlisync/ctrlisb between a reader's loads
    # whenever its first load is an acquire
    "iriw_acq_acq": (F, F, A, A, F),
    "iriw_acq_sc": (F, F, A, A, F),
    "iriw_sc_acq": (F, F, A, A, F),
    # a full fence separates every load pair under every mapping
    "iriw_sc_sc": (F, F, F, F, F),
    "rwc_acq": (F, F, A, A, F),
    "rwc_sc": (F, F, F, F, F),
    # MP with lwsync/dmb on the writer and ctrlisync/ctrlisb/dmb on the reader
    "mp_rel_acq": (F, F, F, F, F),
    # store->load pairs separated by a full fence under every mapping
    "sb_sc": (F, F, F, F, F),
    # no fences at all
    "sb_rlx": (A, A, A, A, A),
}


def main():
    out_dir = pathlib.Path(__file__).resolve().parents[1] / "src" / "mapcheck" / "corpus" / "compiled"
    out_dir.mkdir(exist_ok=True)
    for entry in load_sources():
        stem = entry.path[: -len(".lit")]
        for table, expect in zip(mapping_catalog(), EXPECTED[stem]):
            compiled = dataclasses.replace(compile_test(entry.test, table), expectation=expect)
            (out_dir / f"{stem}.{table.name}.lit").write_text(render_litmus(compiled))


if __name__ == "__main__":
    main()
