"""Canonical interchange format: sectioned key=value text documents.

Every document starts with a `ggpu <doctype> v<schema>` header line and is
followed by `[section]` blocks of `key = value` lines.  Blank lines and
`#` comments are ignored.  The same format carries designs, tech params,
workloads and simulation parameters; the CLI and the HTTP service exchange
these documents verbatim.
"""

from __future__ import annotations

import re

from .design import (
    Design,
    GGpuConfig,
    GroupMeta,
    LogicStage,
    MemBlockInstance,
    MemBlockSpec,
    Net,
    PipelineReg,
    SplitMeta,
    Transform,
)
from .errors import ParseError
from .tech import AggregateRow, TechParams

SCHEMA_VERSION = 1

_PARTITION_RE = re.compile(r"^(mem_controller|top|cu[0-7])$")

_REQUIRED = object()


class Section:
    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.entries: dict[str, tuple[str, int]] = {}

    def get(self, key: str, conv, default=_REQUIRED):
        if key not in self.entries:
            if default is _REQUIRED:
                raise ParseError(f"missing key '{key}' in [{self.name}]", line=self.line, field=key)
            return default
        raw, line = self.entries[key]
        try:
            return conv(raw)
        except (ValueError, TypeError) as e:
            raise ParseError(f"bad value '{raw}': {e}", line=line, field=key) from e


def parse_document(text: str, doctype: str) -> list[Section]:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty document", line=1)
    header = lines[0].strip().split()
    if len(header) != 3 or header[0] != "ggpu" or not header[2].startswith("v"):
        raise ParseError("expected header 'ggpu <doctype> v<schema>'", line=1)
    if header[1] != doctype:
        raise ParseError(f"expected a '{doctype}' document, got '{header[1]}'", line=1)
    if header[2] != f"v{SCHEMA_VERSION}":
        raise ParseError(f"unsupported schema version '{header[2]}'", line=1)

    sections: list[Section] = []
    current: Section | None = None
    for i, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = Section(line[1:-1], i)
            sections.append(current)
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got '{line}'", line=i)
        if current is None:
            raise ParseError("key outside any section", line=i)
        key, _, val = line.partition("=")
        current.entries[key.strip()] = (val.strip(), i)
    return sections


def _emit(doctype: str, sections: list[tuple[str, list[tuple[str, object]]]]) -> str:
    out = [f"ggpu {doctype} v{SCHEMA_VERSION}"]
    for name, entries in sections:
        out.append("")
        out.append(f"[{name}]")
        for k, v in entries:
            if v is None:
                continue
            out.append(f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}")
    return "\n".join(out) + "\n"


def _partition(raw: str) -> str:
    if not _PARTITION_RE.match(raw):
        raise ValueError(f"unknown partition tag '{raw}'")
    return raw


def _opt_str(raw: str) -> str | None:
    return None if raw == "-" else raw


def _opt_int(raw: str) -> int | None:
    return None if raw == "-" else int(raw)


# ---------------------------------------------------------------------------
# Design documents
# ---------------------------------------------------------------------------


def write_design(d: Design) -> str:
    sections: list[tuple[str, list[tuple[str, object]]]] = []
    c = d.config
    sections.append(
        (
            "config",
            [
                ("num_cus", c.num_cus),
                ("pes_per_cu", c.pes_per_cu),
                ("wf_size", c.wf_size),
                ("max_workitems_per_cu", c.max_workitems_per_cu),
                ("data_channels", c.data_channels),
                ("control_channels", c.control_channels),
            ],
        )
    )
    for m in d.memories:
        entries = [
            ("id", m.id),
            ("words", m.spec.words),
            ("word_bits", m.spec.word_bits),
            ("ports", m.spec.ports),
            ("partition", m.partition),
            ("logical_parent", m.logical_parent if m.logical_parent else "-"),
        ]
        if m.split_meta:
            entries += [
                ("split_axis", m.split_meta.axis),
                ("split_fan", m.split_meta.fan),
                ("bank_index", m.split_meta.bank_index),
            ]
        sections.append(("memory", entries))
    for s in d.stages:
        sections.append(
            ("stage", [("id", s.id), ("partition", s.partition), ("delay_ns", s.delay_ns)])
        )
    for n in d.nets:
        sections.append(("net", [("src", n.src), ("dst", n.dst), ("width", n.width)]))
    for g in d.groups:
        sections.append(
            (
                "group",
                [
                    ("parent_id", g.parent_id),
                    ("axis", g.axis),
                    ("fan", g.fan),
                    ("parent_words", g.parent_words),
                    ("parent_word_bits", g.parent_word_bits),
                    ("parent_partition", g.parent_partition),
                    ("parent_logical_parent", g.parent_logical_parent if g.parent_logical_parent else "-"),
                    ("parent_bank_index", g.parent_bank_index if g.parent_bank_index is not None else "-"),
                ],
            )
        )
    for pr in d.pipeline_regs:
        sections.append(
            ("pipeline", [("id", pr.id), ("host_net", pr.host_net), ("width", pr.width)])
        )
    for t in d.transform_log:
        sections.append(
            (
                "transform",
                [
                    ("kind", t.kind),
                    ("target", t.target),
                    ("fan", t.fan if t.fan is not None else "-"),
                    ("sequence_no", t.sequence_no),
                ],
            )
        )
    return _emit("design", sections)


def read_design(text: str) -> Design:
    sections = parse_document(text, "design")
    config = None
    memories: list[MemBlockInstance] = []
    stages: list[LogicStage] = []
    nets: list[Net] = []
    groups: list[GroupMeta] = []
    pipes: list[PipelineReg] = []
    log: list[Transform] = []
    for sec in sections:
        if sec.name == "config":
            config = GGpuConfig(
                num_cus=sec.get("num_cus", int),
                pes_per_cu=sec.get("pes_per_cu", int, 8),
                wf_size=sec.get("wf_size", int, 64),
                max_workitems_per_cu=sec.get("max_workitems_per_cu", int, 512),
                data_channels=sec.get("data_channels", int, 1),
                control_channels=sec.get("control_channels", int, 1),
            )
        elif sec.name == "memory":
            axis = sec.get("split_axis", str, None)
            meta = None
            if axis is not None:
                meta = SplitMeta(
                    axis=axis,
                    fan=sec.get("split_fan", int),
                    bank_index=sec.get("bank_index", int),
                )
            memories.append(
                MemBlockInstance(
                    id=sec.get("id", str),
                    spec=MemBlockSpec(
                        words=sec.get("words", int),
                        word_bits=sec.get("word_bits", int),
                        ports=sec.get("ports", str, "dual"),
                    ),
                    partition=sec.get("partition", _partition),
                    logical_parent=sec.get("logical_parent", _opt_str, None),
                    split_meta=meta,
                )
            )
        elif sec.name == "stage":
            stages.append(
                LogicStage(
                    id=sec.get("id", str),
                    partition=sec.get("partition", _partition),
                    delay_ns=sec.get("delay_ns", float),
                )
            )
        elif sec.name == "net":
            src = sec.get("src", str)
            dst = sec.get("dst", str)
            nets.append(
                Net(
                    id=f"{src.split(':', 1)[1]}->{dst.split(':', 1)[1]}",
                    src=src,
                    dst=dst,
                    width=sec.get("width", int, 1),
                )
            )
        elif sec.name == "group":
            groups.append(
                GroupMeta(
                    parent_id=sec.get("parent_id", str),
                    axis=sec.get("axis", str),
                    fan=sec.get("fan", int),
                    parent_words=sec.get("parent_words", int),
                    parent_word_bits=sec.get("parent_word_bits", int),
                    parent_partition=sec.get("parent_partition", _partition),
                    parent_logical_parent=sec.get("parent_logical_parent", _opt_str, None),
                    parent_bank_index=sec.get("parent_bank_index", _opt_int, None),
                )
            )
        elif sec.name == "pipeline":
            pipes.append(
                PipelineReg(
                    id=sec.get("id", str),
                    host_net=sec.get("host_net", str),
                    width=sec.get("width", int),
                )
            )
        elif sec.name == "transform":
            log.append(
                Transform(
                    kind=sec.get("kind", str),
                    target=sec.get("target", str),
                    fan=sec.get("fan", _opt_int, None),
                    sequence_no=sec.get("sequence_no", int),
                )
            )
        else:
            raise ParseError(f"unknown section '[{sec.name}]'", line=sec.line)
    if config is None:
        raise ParseError("document has no [config] section")
    return Design(
        config=config,
        memories=tuple(memories),
        stages=tuple(stages),
        nets=tuple(nets),
        groups=tuple(groups),
        pipeline_regs=tuple(pipes),
        transform_log=tuple(log),
    ).evolve()


# ---------------------------------------------------------------------------
# Tech-params documents
# ---------------------------------------------------------------------------


def write_tech_params(p: TechParams) -> str:
    entries = [(k, v) for k, v in p.__dict__.items()]
    return _emit("tech-params", [("tech-params", entries)])


def read_tech_params(text: str) -> TechParams:
    sections = parse_document(text, "tech-params")
    for sec in sections:
        if sec.name == "tech-params":
            kwargs = {}
            for key in TechParams().__dict__:
                kwargs[key] = sec.get(key, float, None)
            return TechParams(**kwargs)
    raise ParseError("document has no [tech-params] section")


# ---------------------------------------------------------------------------
# Delimited aggregate tables (the published characteristics fixture)
# ---------------------------------------------------------------------------

TABLE1_COLUMNS = (
    "cu",
    "freq_mhz",
    "total_area_mm2",
    "memory_area_mm2",
    "num_ff",
    "num_comb",
    "num_memory",
    "leakage_mw",
    "dynamic_w",
    "total_w",
)


def read_table1(text: str) -> list[AggregateRow]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty table", line=1)
    header = tuple(lines[0].split("\t"))
    if header != TABLE1_COLUMNS:
        raise ParseError(f"expected columns {TABLE1_COLUMNS}, got {header}", line=1)
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        cells = ln.split("\t")
        if len(cells) != len(TABLE1_COLUMNS):
            raise ParseError(f"expected {len(TABLE1_COLUMNS)} cells", line=i)
        try:
            rows.append(
                AggregateRow(
                    cus=int(cells[0]),
                    freq_mhz=int(cells[1]),
                    total_area_mm2=float(cells[2]),
                    memory_area_mm2=float(cells[3]),
                    ff=int(cells[4]),
                    comb=int(cells[5]),
                    memory=int(cells[6]),
                    leakage_mw=float(cells[7]),
                    dynamic_w=float(cells[8]),
                    total_w=float(cells[9]),
                )
            )
        except ValueError as e:
            raise ParseError(str(e), line=i) from e
    return rows


def write_table1(rows: list[AggregateRow]) -> str:
    out = ["\t".join(TABLE1_COLUMNS)]
    for r in rows:
        out.append(
            "\t".join(
                str(v)
                for v in (
                    r.cus,
                    r.freq_mhz,
                    r.total_area_mm2,
                    r.memory_area_mm2,
                    r.ff,
                    r.comb,
                    r.memory,
                    r.leakage_mw,
                    r.dynamic_w,
                    r.total_w,
                )
            )
        )
    return "\n".join(out) + "\n"
