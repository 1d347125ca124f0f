"""Text formats: instances, solutions, ground-truth sidecars, benchmark CSV.

Instance files::

    # optional comments anywhere
    ewcd 1 <n> <m>
    e <u> <v> <w>     one line per edge
    a <v> <w>         optional vertex annotations

Solution files start with ``yes``/``no``/``timeout``, then ``c <weight>
<v1> <v2> ...`` per clique (largest first), then ``s <key> <value>`` stat
lines.  Every weight is written exactly: integers plainly, finite decimals
as decimals, anything else as ``num/den``; the parser accepts all three, so
parse(write(x)) is the identity.  Files are UTF-8 with newline endings.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .instance import InstanceError, WeightedGraph
from .solution import Decomposition

__all__ = [
    "BENCH_FIELDS",
    "BENCH_SCHEMA_VERSION",
    "MANIFEST_FIELDS",
    "ParseError",
    "SolutionDoc",
    "format_weight",
    "parse_instance",
    "parse_manifest",
    "parse_solution",
    "parse_truth",
    "parse_weight",
    "write_bench_csv",
    "write_instance",
    "write_manifest",
    "write_solution",
    "write_truth",
]

BENCH_SCHEMA_VERSION = 1
BENCH_FIELDS = (
    "instance_id",
    "n",
    "m",
    "k_true",
    "k_in",
    "kernel_variant",
    "n_kernel",
    "ordering",
    "srules",
    "lp_runs",
    "signatures_tested",
    "backtracks",
    "outcome",
    "wall_ms",
)
MANIFEST_FIELDS = ("instance_id", "file", "truth_file", "n", "m", "k_true", "k_in", "expected")


class ParseError(ValueError):
    """Malformed input file; carries the 1-based offending line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_weight(token: str, line: int) -> Fraction:
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"invalid weight {token!r}", line) from None
    return value


def format_weight(w: Fraction) -> str:
    """Exact text form of a weight: integer, finite decimal, or num/den."""
    w = Fraction(w)
    if w.denominator == 1:
        return str(w.numerator)
    den = w.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        digits = max(twos, fives)
        scaled = w * 10**digits
        text = str(scaled.numerator).rjust(digits + 1, "0")
        return f"{text[:-digits]}.{text[-digits:]}" if digits else text
    return f"{w.numerator}/{w.denominator}"


def _content_lines(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped.split()


def _parse_int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"invalid {what} {token!r}", line) from None


def parse_instance(text: str) -> tuple[WeightedGraph, dict[int, Fraction]]:
    """Parse an instance file into a graph plus vertex annotations."""
    header: tuple[int, int] | None = None
    header_line = 0
    edges: list[tuple[int, int, Fraction]] = []
    seen: dict[tuple[int, int], int] = {}
    annotations: dict[int, Fraction] = {}
    n = 0
    for lineno, tokens in _content_lines(text):
        kind = tokens[0]
        if header is None:
            if kind != "ewcd":
                raise ParseError(f"expected 'ewcd' header, got {kind!r}", lineno)
            if len(tokens) != 4:
                raise ParseError("header must be 'ewcd 1 <n> <m>'", lineno)
            if tokens[1] != "1":
                raise ParseError(f"unsupported format version {tokens[1]!r}", lineno)
            n = _parse_int(tokens[2], lineno, "vertex count")
            m = _parse_int(tokens[3], lineno, "edge count")
            if n < 0 or m < 0:
                raise ParseError("vertex and edge counts must be nonnegative", lineno)
            header = (n, m)
            header_line = lineno
            continue
        if kind == "e":
            if len(tokens) != 4:
                raise ParseError("edge line must be 'e <u> <v> <w>'", lineno)
            u = _parse_int(tokens[1], lineno, "vertex id")
            v = _parse_int(tokens[2], lineno, "vertex id")
            w = parse_weight(tokens[3], lineno)
            if u == v:
                raise ParseError(f"self-loop at vertex {u}", lineno)
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"edge ({u},{v}) outside vertex range [0,{n})", lineno)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ParseError(
                    f"duplicate edge ({u},{v}); first seen at line {seen[key]}", lineno
                )
            if w <= 0:
                raise ParseError(f"edge ({u},{v}) has non-positive weight {w}", lineno)
            seen[key] = lineno
            edges.append((u, v, w))
        elif kind == "a":
            if len(tokens) != 3:
                raise ParseError("annotation line must be 'a <v> <w>'", lineno)
            v = _parse_int(tokens[1], lineno, "vertex id")
            w = parse_weight(tokens[2], lineno)
            if not 0 <= v < n:
                raise ParseError(f"annotation on vertex {v} outside [0,{n})", lineno)
            if v in annotations:
                raise ParseError(f"duplicate annotation for vertex {v}", lineno)
            if w < 0:
                raise ParseError(f"annotation of {v} is negative", lineno)
            annotations[v] = w
        else:
            raise ParseError(f"unknown line kind {kind!r}", lineno)
    if header is None:
        raise ParseError("missing 'ewcd 1 <n> <m>' header", 1)
    if len(edges) != header[1]:
        raise ParseError(
            f"header declares {header[1]} edges but {len(edges)} were given", header_line
        )
    try:
        graph = WeightedGraph(n, edges)
    except InstanceError as exc:  # defensive: per-line checks above should catch all
        raise ParseError(str(exc), header_line) from exc
    return graph, annotations


def write_instance(
    g: WeightedGraph,
    annotations: Mapping[int, Fraction] | None = None,
    comment: str | None = None,
) -> str:
    lines = []
    if comment:
        for part in comment.splitlines():
            lines.append(f"# {part}")
    lines.append(f"ewcd 1 {g.n} {g.m}")
    for u, v, w in sorted(g.edges):
        lines.append(f"e {u} {v} {format_weight(w)}")
    for v in sorted(annotations or {}):
        lines.append(f"a {v} {format_weight(annotations[v])}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SolutionDoc:
    """Parsed solution file: outcome, cliques, and raw stat strings."""

    outcome: str
    cliques: tuple[tuple[Fraction, tuple[int, ...]], ...]
    stats: tuple[tuple[str, str], ...]


def write_solution(
    outcome: str,
    decomposition: Decomposition | None,
    stats: Mapping[str, object] | None = None,
    *,
    include_singletons: bool = False,
) -> str:
    """Serialize a solve outcome.

    Cliques are written largest first (ties by smallest member), members
    ascending.  Singleton cliques only appear when asked for, which annotated
    instances need; plain instances never require them.
    """
    if outcome not in ("yes", "no", "timeout"):
        raise ValueError(f"unknown outcome {outcome!r}")
    if (decomposition is not None) != (outcome == "yes"):
        raise ValueError("a decomposition is required exactly when the outcome is yes")
    lines = [outcome]
    if decomposition is not None:
        cliques = [
            (sorted(members), weight)
            for members, weight in decomposition.cliques
            if len(members) >= 2 or include_singletons
        ]
        cliques.sort(key=lambda c: (-len(c[0]), c[0]))
        for members, weight in cliques:
            lines.append("c " + format_weight(weight) + " " + " ".join(map(str, members)))
    for key, value in (stats or {}).items():
        if " " in key:
            raise ValueError(f"stat key {key!r} contains whitespace")
        lines.append(f"s {key} {value}")
    return "\n".join(lines) + "\n"


def parse_solution(text: str) -> SolutionDoc:
    outcome: str | None = None
    cliques: list[tuple[Fraction, tuple[int, ...]]] = []
    stats: list[tuple[str, str]] = []
    for lineno, tokens in _content_lines(text):
        if outcome is None:
            if tokens[0] not in ("yes", "no", "timeout") or len(tokens) != 1:
                raise ParseError("first line must be yes, no, or timeout", lineno)
            outcome = tokens[0]
            continue
        if tokens[0] == "c":
            if len(tokens) < 3:
                raise ParseError("clique line must be 'c <w> <v1> ...'", lineno)
            weight = parse_weight(tokens[1], lineno)
            members = tuple(_parse_int(t, lineno, "vertex id") for t in tokens[2:])
            if len(set(members)) != len(members):
                raise ParseError("clique repeats a member", lineno)
            cliques.append((weight, members))
        elif tokens[0] == "s":
            if len(tokens) != 3:
                raise ParseError("stat line must be 's <key> <value>'", lineno)
            stats.append((tokens[1], tokens[2]))
        else:
            raise ParseError(f"unknown line kind {tokens[0]!r}", lineno)
    if outcome is None:
        raise ParseError("empty solution file", 1)
    return SolutionDoc(outcome=outcome, cliques=tuple(cliques), stats=tuple(stats))


def write_truth(k_true: int, planted: Sequence[tuple[frozenset[int], Fraction]]) -> str:
    lines = [f"k_true {k_true}"]
    ordered = sorted(((sorted(m), w) for m, w in planted), key=lambda c: (-len(c[0]), c[0]))
    for members, weight in ordered:
        lines.append("c " + format_weight(weight) + " " + " ".join(map(str, members)))
    return "\n".join(lines) + "\n"


def parse_truth(text: str) -> tuple[int, tuple[tuple[frozenset[int], Fraction], ...]]:
    k_true: int | None = None
    cliques: list[tuple[frozenset[int], Fraction]] = []
    for lineno, tokens in _content_lines(text):
        if tokens[0] == "k_true":
            if len(tokens) != 2:
                raise ParseError("k_true line must be 'k_true <int>'", lineno)
            k_true = _parse_int(tokens[1], lineno, "k_true")
        elif tokens[0] == "c":
            if len(tokens) < 3:
                raise ParseError("clique line must be 'c <w> <v1> ...'", lineno)
            weight = parse_weight(tokens[1], lineno)
            members = frozenset(_parse_int(t, lineno, "vertex id") for t in tokens[2:])
            cliques.append((members, weight))
        else:
            raise ParseError(f"unknown line kind {tokens[0]!r}", lineno)
    if k_true is None:
        raise ParseError("missing k_true line", 1)
    return k_true, tuple(cliques)


def write_manifest(rows: Sequence[Mapping[str, object]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=MANIFEST_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({field: row[field] for field in MANIFEST_FIELDS})
    return buf.getvalue()


def parse_manifest(text: str) -> list[dict[str, str]]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != MANIFEST_FIELDS:
        raise ParseError(
            f"manifest header must be {','.join(MANIFEST_FIELDS)}", 1
        )
    return [dict(row) for row in reader]


def write_bench_csv(records: Sequence[Mapping[str, object]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow({field: record[field] for field in BENCH_FIELDS})
    return buf.getvalue()
