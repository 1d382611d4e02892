"""Query-log ingestion: on-disk formats to an indexed, immutable workload store."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Iterator
from urllib.parse import unquote_plus

from .parser import ParsedQuery, ParseError, parse_query
from .query_graph import QueryGraph, build_graph, concrete_node_terms
from .terms import Term

logger = logging.getLogger(__name__)

RAW_LINES = "raw-lines"
URLENCODED_LINES = "urlencoded-lines"
RQ_DIRECTORY = "rq-directory"
TSV = "tsv"
FORMATS = (RAW_LINES, URLENCODED_LINES, RQ_DIRECTORY, TSV)


class IoError(Exception):
    """Input path missing or unreadable."""


class EmptyWorkload(Exception):
    """No query in the input could be parsed."""


class WorkloadStore:
    """Parsed queries plus an inverted index from concrete terms to query ids.

    Treated as immutable after construction; the lazy per-query graph cache
    is an internal memo shared with subset stores (query ids are preserved
    when subsetting, so cached graphs remain valid).
    """

    __slots__ = (
        "queries", "rejected_count", "term_index", "_by_id", "_graphs", "_node_terms",
    )

    def __init__(self, queries: Iterable[ParsedQuery], rejected_count: int = 0,
                 graph_cache: dict[int, QueryGraph] | None = None,
                 node_term_cache: dict[int, frozenset[Term]] | None = None):
        self.queries: list[ParsedQuery] = list(queries)
        self.rejected_count = rejected_count
        self.term_index: dict[Term, set[int]] = {}
        self._by_id: dict[int, ParsedQuery] = {}
        for q in self.queries:
            if q.id in self._by_id:
                raise ValueError(f"duplicate query id {q.id}")
            self._by_id[q.id] = q
            for pattern in q.patterns:
                for term in pattern.terms():
                    if term.concrete:
                        self.term_index.setdefault(term, set()).add(q.id)
        self._graphs: dict[int, QueryGraph] = {} if graph_cache is None else graph_cache
        self._node_terms: dict[int, frozenset[Term]] = (
            {} if node_term_cache is None else node_term_cache
        )

    def __len__(self) -> int:
        return len(self.queries)

    def ids(self) -> list[int]:
        return sorted(self._by_id)

    def query(self, query_id: int) -> ParsedQuery:
        return self._by_id[query_id]

    def graph(self, query_id: int) -> QueryGraph:
        g = self._graphs.get(query_id)
        if g is None:
            g = build_graph(self._by_id[query_id])
            self._graphs[query_id] = g
        return g

    def node_terms(self, query_id: int) -> frozenset[Term]:
        """Concrete nodes of the query's collapsed graph (memoized)."""
        terms = self._node_terms.get(query_id)
        if terms is None:
            terms = concrete_node_terms(self._by_id[query_id])
            self._node_terms[query_id] = terms
        return terms

    def filter(self, terms: Iterable[Term]) -> list[int]:
        """Ids of queries containing every given term, ascending.

        An empty term set matches every query.  Terms must be concrete.
        """
        result: set[int] | None = None
        for term in terms:
            if not term.concrete:
                raise ValueError(f"filter terms must be concrete, got {term.to_sparql()}")
            ids = self.term_index.get(term)
            if not ids:
                return []
            result = set(ids) if result is None else result & ids
            if not result:
                return []
        if result is None:
            return self.ids()
        return sorted(result)

    def subset(self, ids: Iterable[int]) -> "WorkloadStore":
        """A store over the given query ids; ids and memo caches are shared."""
        wanted = set(ids)
        picked = [q for q in self.queries if q.id in wanted]
        return WorkloadStore(
            picked, rejected_count=0,
            graph_cache=self._graphs, node_term_cache=self._node_terms,
        )


def _iter_lines(path: Path) -> Iterator[tuple[int, str]]:
    try:
        with open(path, encoding="utf-8", errors="replace") as fh:
            for line_no, line in enumerate(fh, start=1):
                yield line_no, line.rstrip("\n")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _iter_records(path: Path, format: str, tsv_column: int | None) -> Iterator[tuple[int, str]]:
    if format == RAW_LINES:
        yield from _iter_lines(path)
    elif format == URLENCODED_LINES:
        for line_no, line in _iter_lines(path):
            yield line_no, unquote_plus(line)
    elif format == TSV:
        for line_no, line in _iter_lines(path):
            cells = line.split("\t")
            text = cells[tsv_column] if tsv_column < len(cells) else ""
            yield line_no, text
    elif format == RQ_DIRECTORY:
        if not path.is_dir():
            raise IoError(f"not a directory: {path}")
        try:
            files = sorted(path.glob("*.rq"))
        except OSError as exc:
            raise IoError(f"cannot list {path}: {exc}") from exc
        for index, rq_file in enumerate(files, start=1):
            try:
                yield index, rq_file.read_text(encoding="utf-8", errors="replace")
            except OSError as exc:
                raise IoError(f"cannot read {rq_file}: {exc}") from exc
    else:
        raise ValueError(f"unknown workload format: {format!r}")


def load_workload(
    path,
    format: str = RAW_LINES,
    tsv_column: int | None = None,
    base_prefix: str | None = None,
) -> WorkloadStore:
    """Stream a query log from disk into a :class:`WorkloadStore`.

    Unparsable records are counted and logged with their line numbers rather
    than aborting the load.  For ``tsv`` input the first row is treated as a
    header and skipped silently if it fails to parse.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown workload format: {format!r}")
    if (tsv_column is None) == (format == TSV):
        raise ValueError("tsv_column is required for tsv input and invalid otherwise")
    path = Path(path)
    if not path.exists():
        raise IoError(f"no such path: {path}")

    queries: list[ParsedQuery] = []
    rejected = 0
    first_record = True
    intern: dict[Term, Term] = {}
    for line_no, text in _iter_records(path, format, tsv_column):
        if not text.strip():
            first_record = False
            continue
        try:
            queries.append(
                parse_query(text, query_id=len(queries), source_line=line_no,
                            base_prefix=base_prefix, intern=intern)
            )
        except ParseError as exc:
            if format == TSV and first_record:
                logger.debug("skipping header row of %s", path)
            else:
                rejected += 1
                logger.warning("rejected record at line %d of %s: %s", line_no, path, exc)
        first_record = False
    if not queries:
        raise EmptyWorkload(f"no parsable query in {path}")
    return WorkloadStore(queries, rejected_count=rejected)
