"""Greedy workload-driven summary construction, plus the random baseline.

The greedy strategy filters the workload down to the queries mentioning the
seed(s), ranks co-occurring nodes by how many of those queries use them, and
links each selected node to the growing summary through the most frequent
shortest query path, resolving leftover variables against the whole workload.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .query_graph import FORWARD, PathSignature, shortest_path
from .rng import XorShift64Star
from .terms import BLANK, LITERAL, VARIABLE, Term, TriplePattern
from .workload import WorkloadStore

ISUMMARY = "isummary"
RANDOM = "random"
STRATEGIES = (ISUMMARY, RANDOM)

ISOLATED_NODE = "IsolatedNode"
UNRESOLVED_VARIABLE = "UnresolvedVariable"
BUDGET_SHORTFALL = "BudgetShortfall"
MULTI_SEED_FALLBACK = "MultiSeedFallback"
RESOLVED_VARIABLE = "ResolvedVariable"
OFF_LEDGER_RESOURCE = "OffLedgerResource"


class NoRelevantQueries(Exception):
    """No workload query contains any of the requested seed terms."""


class InvalidRequest(Exception):
    """Malformed summary request (bad budget, unknown strategy, ...)."""


@dataclass(frozen=True)
class SummaryWarning:
    kind: str
    message: str
    term: Term | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "message": self.message,
            "term": self.term.to_json() if self.term is not None else None,
        }


@dataclass(frozen=True)
class SummaryRequest:
    """Seeds, node budget and strategy for one summary run."""

    seeds: tuple[Term, ...]
    k: int
    strategy: str = ISUMMARY
    random_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(self.seeds))
        if not self.seeds:
            raise InvalidRequest("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise InvalidRequest("seeds must be distinct")
        for seed in self.seeds:
            if not seed.concrete:
                raise InvalidRequest(f"seeds must be concrete, got {seed.to_sparql()}")
        if self.k < len(self.seeds):
            raise InvalidRequest(f"budget k={self.k} is below the seed count {len(self.seeds)}")
        if self.strategy not in STRATEGIES:
            raise InvalidRequest(f"unknown strategy: {self.strategy!r}")


@dataclass(frozen=True)
class Summary:
    """Ordered summary triples plus the node-weight ledger and warnings."""

    triples: tuple[TriplePattern, ...]
    nodes: tuple[tuple[Term, int], ...]
    warnings: tuple[SummaryWarning, ...]
    seeds: tuple[Term, ...]
    k: int
    strategy: str


def node_frequencies(
    store: WorkloadStore, relevant_ids: Iterable[int], exclude: Iterable[Term] = ()
) -> Counter:
    """Distinct-query counts of every concrete node in the given queries' graphs."""
    excluded = set(exclude)
    freq: Counter = Counter()
    for qid in relevant_ids:
        for term in store.node_terms(qid):
            if term not in excluded:
                freq[term] += 1
    return freq


def select_top_nodes(
    store: WorkloadStore,
    relevant_ids: Iterable[int],
    count: int,
    exclude: Iterable[Term] = (),
) -> list[tuple[Term, int]]:
    """Top nodes by (frequency desc, term asc); may return fewer than asked."""
    if count < 0:
        raise ValueError("count must be non-negative")
    freq = node_frequencies(store, relevant_ids, exclude)
    ranked = sorted(freq.items(), key=lambda item: (-item[1], item[0].sort_key()))
    return ranked[:count]


def link(
    store: WorkloadStore,
    relevant_ids: Iterable[int],
    x: Term,
    visited: Sequence[Term],
) -> PathSignature | None:
    """Most frequent shortest query path linking ``x`` to any visited node.

    Path frequencies accumulate across all visited partners and all queries;
    ties break by shorter length, then least signature.  Returns None when no
    relevant query connects ``x`` to the summary.
    """
    if not visited:
        raise ValueError("visited set must be non-empty")
    if x in visited:
        raise ValueError("node to link is already in the summary")
    relevant = set(relevant_ids)
    tally: Counter = Counter()
    for y in visited:
        for qid in store.filter((x, y)):
            if qid not in relevant:
                continue
            signature = shortest_path(store.graph(qid), x, y)
            if signature is not None:
                tally[signature] += 1
    if not tally:
        return None
    return min(tally, key=lambda s: (-tally[s], len(s.steps), s.sort_key()))


def _position_counts(store: WorkloadStore, predicate: Term, side: str) -> Counter:
    """Distinct-query counts of concrete terms in (predicate, side) position."""
    counts: Counter = Counter()
    for qid in store.filter((predicate,)):
        seen = set()
        for pattern in store.query(qid).patterns:
            if pattern.predicate != predicate:
                continue
            term = pattern.subject if side == "subject" else pattern.object
            if term.concrete:
                seen.add(term)
        for term in seen:
            counts[term] += 1
    return counts


def _predicate_counts(store: WorkloadStore, source: Term, target: Term) -> Counter:
    """Distinct-query counts of concrete predicates seen next to either endpoint."""
    counts: Counter = Counter()
    for anchor, side in ((source, "subject"), (target, "object")):
        if not anchor.concrete:
            continue
        for qid in store.filter((anchor,)):
            seen = set()
            for pattern in store.query(qid).patterns:
                end = pattern.subject if side == "subject" else pattern.object
                if end == anchor and pattern.predicate.concrete:
                    seen.add(pattern.predicate)
            for term in seen:
                counts[term] += 1
    return counts


def _most_frequent(counts: Counter) -> Term | None:
    if not counts:
        return None
    return min(counts, key=lambda t: (-counts[t], t.sort_key()))


def resolve_variables(
    path: PathSignature,
    store: WorkloadStore,
    blanks: "itertools.count | None" = None,
) -> tuple[list[TriplePattern], list[SummaryWarning]]:
    """Turn a path into summary triples, substituting its variables.

    Variable waypoints take the most frequent concrete term seen anywhere in
    the workload at the same structural position (same predicate, same side);
    with no candidate a fresh blank node is used and a warning emitted.
    Variable predicates are mined from patterns around the resolved endpoints;
    if nothing matches, the step's triple is omitted with a warning.
    """
    if blanks is None:
        blanks = itertools.count()
    warnings: list[SummaryWarning] = []

    # resolve waypoints first: each is constrained by the steps around it
    waypoints: list[Term] = []
    for index, step in enumerate(path.steps):
        term = step.waypoint
        if term.kind != VARIABLE:
            waypoints.append(term)
            continue
        counts: Counter = Counter()
        incoming_side = "object" if step.direction == FORWARD else "subject"
        if step.predicate.concrete:
            counts.update(_position_counts(store, step.predicate, incoming_side))
        outgoing_side = None
        if index + 1 < len(path.steps):
            nxt = path.steps[index + 1]
            outgoing_side = "subject" if nxt.direction == FORWARD else "object"
            if nxt.predicate.concrete:
                counts.update(_position_counts(store, nxt.predicate, outgoing_side))
        if "subject" in (incoming_side, outgoing_side):
            # the substitution will be written as a subject somewhere
            counts = Counter({t: c for t, c in counts.items() if t.kind != LITERAL})
        chosen = _most_frequent(counts)
        if chosen is None:
            chosen = Term(BLANK, f"u{next(blanks)}")
            warnings.append(SummaryWarning(
                UNRESOLVED_VARIABLE,
                f"no concrete candidate for waypoint ?{term.lexical}; using blank node",
                chosen,
            ))
        else:
            warnings.append(SummaryWarning(
                RESOLVED_VARIABLE,
                f"waypoint ?{term.lexical} resolved from workload",
                chosen,
            ))
        waypoints.append(chosen)

    triples: list[TriplePattern] = []
    current = path.endpoints[0]
    for step, waypoint in zip(path.steps, waypoints):
        predicate = step.predicate
        if predicate.kind == VARIABLE:
            source, target = (current, waypoint) if step.direction == FORWARD else (waypoint, current)
            mined = _most_frequent(_predicate_counts(store, source, target))
            if mined is None:
                warnings.append(SummaryWarning(
                    UNRESOLVED_VARIABLE,
                    f"variable predicate ?{predicate.lexical} has no workload candidate;"
                    " triple omitted",
                ))
                current = waypoint
                continue
            warnings.append(SummaryWarning(
                RESOLVED_VARIABLE,
                f"predicate ?{predicate.lexical} resolved from workload",
                mined,
            ))
            predicate = mined
        if step.direction == FORWARD:
            triples.append(TriplePattern(current, predicate, waypoint))
        else:
            triples.append(TriplePattern(waypoint, predicate, current))
        current = waypoint
    return triples, warnings


def _relevant_ids(store: WorkloadStore, seeds: Sequence[Term]):
    """Queries containing all seeds, with a per-seed union fallback for λ > 1."""
    warnings: list[SummaryWarning] = []
    ids = store.filter(seeds)
    if not ids and len(seeds) > 1:
        merged: set[int] = set()
        for seed in seeds:
            merged.update(store.filter((seed,)))
        if merged:
            warnings.append(SummaryWarning(
                MULTI_SEED_FALLBACK,
                "no query contains every seed; using the per-seed union",
            ))
        ids = sorted(merged)
    if not ids:
        raise NoRelevantQueries(
            "no workload query contains " + ", ".join(s.to_sparql() for s in seeds)
        )
    return ids, warnings


def _append_unique(triples, seen, new_triples):
    for triple in new_triples:
        if triple not in seen:
            seen.add(triple)
            triples.append(triple)


def _greedy_summary(store, request, relevant, warnings):
    triples: list[TriplePattern] = []
    seen: set[TriplePattern] = set()
    blanks = itertools.count()
    nodes: list[tuple[Term, int]] = [(seed, len(relevant)) for seed in request.seeds]
    visited: list[Term] = [request.seeds[0]]

    def attach(term):
        signature = link(store, relevant, term, visited)
        if signature is None:
            warnings.append(SummaryWarning(
                ISOLATED_NODE,
                f"no relevant query links {term.to_sparql()} to the summary",
                term,
            ))
        else:
            resolved, extra = resolve_variables(signature, store, blanks)
            _append_unique(triples, seen, resolved)
            warnings.extend(extra)
        visited.append(term)

    for seed in request.seeds[1:]:
        attach(seed)

    budget = request.k - len(request.seeds)
    top = select_top_nodes(store, relevant, budget, exclude=request.seeds)
    if len(top) < budget:
        warnings.append(SummaryWarning(
            BUDGET_SHORTFALL,
            f"only {len(top)} candidate node(s) available for a budget of {budget}",
        ))
    for term, frequency in top:
        attach(term)
        nodes.append((term, frequency))
    return triples, nodes


def _random_summary(store, request, relevant, warnings):
    rng = XorShift64Star(request.random_seed)
    freq = node_frequencies(store, relevant, exclude=request.seeds)
    pool = sorted(freq, key=Term.sort_key)
    budget = request.k - len(request.seeds)
    chosen = rng.sample(pool, min(budget, len(pool)))
    if len(chosen) < budget:
        warnings.append(SummaryWarning(
            BUDGET_SHORTFALL,
            f"only {len(chosen)} candidate node(s) available for a budget of {budget}",
        ))

    # ledger stays sorted by weight so the frequency column is non-increasing
    selected = sorted(((t, freq[t]) for t in chosen), key=lambda kv: (-kv[1], kv[0].sort_key()))
    nodes = [(seed, len(relevant)) for seed in request.seeds] + selected

    incident: dict[Term, set] = {t: set() for t in chosen}
    if chosen:
        wanted = set(chosen)
        for qid in relevant:
            for edge in store.graph(qid).edges:
                if edge.source in wanted:
                    incident[edge.source].add(edge)
                if edge.target in wanted:
                    incident[edge.target].add(edge)

    triples: list[TriplePattern] = []
    seen: set[TriplePattern] = set()
    blanks = itertools.count()
    for term, _ in selected:
        edges = sorted(incident[term], key=lambda e: (e.source.sort_key(), e.predicate.sort_key(), e.target.sort_key()))
        if not edges:
            warnings.append(SummaryWarning(
                ISOLATED_NODE,
                f"{term.to_sparql()} has no incident edge in the relevant queries",
                term,
            ))
            continue
        edge = edges[rng.randrange(len(edges))]
        if not edge.predicate.concrete:
            warnings.append(SummaryWarning(
                UNRESOLVED_VARIABLE,
                f"sampled edge at {term.to_sparql()} has a variable predicate; omitted",
            ))
            continue
        substitutions: dict[Term, Term] = {}

        def ground(t):
            if t.kind != VARIABLE:
                return t
            if t not in substitutions:
                substitutions[t] = Term(BLANK, f"u{next(blanks)}")
                warnings.append(SummaryWarning(
                    UNRESOLVED_VARIABLE,
                    f"sampled edge endpoint ?{t.lexical} replaced by blank node",
                    substitutions[t],
                ))
            return substitutions[t]

        _append_unique(triples, seen, [TriplePattern(ground(edge.source), edge.predicate, ground(edge.target))])
    return triples, nodes


def summarize(store: WorkloadStore, request: SummaryRequest) -> Summary:
    """Build a personalized summary of ``store`` for the given request.

    Deterministic for a fixed store and request; the random strategy is a
    pure function of its ``random_seed``.
    """
    if not store.queries:
        raise NoRelevantQueries("the workload store is empty")
    relevant, warnings = _relevant_ids(store, request.seeds)
    if request.strategy == ISUMMARY:
        triples, nodes = _greedy_summary(store, request, relevant, warnings)
    else:
        triples, nodes = _random_summary(store, request, relevant, warnings)

    # provenance for concrete endpoints that ride in on paths or sampled edges
    ledger = {term for term, _ in nodes}
    flagged = {w.term for w in warnings if w.term is not None}
    for triple in triples:
        for term in (triple.subject, triple.object):
            if term.concrete and term not in ledger and term not in flagged:
                flagged.add(term)
                warnings.append(SummaryWarning(
                    OFF_LEDGER_RESOURCE,
                    f"{term.to_sparql()} appears in the summary outside the node budget",
                    term,
                ))

    return Summary(
        triples=tuple(triples),
        nodes=tuple(nodes),
        warnings=tuple(warnings),
        seeds=request.seeds,
        k=request.k,
        strategy=request.strategy,
    )


def to_ntriples(summary: Summary) -> str:
    return "".join(t.to_ntriples() + "\n" for t in summary.triples)


def to_json_dict(summary: Summary) -> dict:
    return {
        "seeds": [s.to_json() for s in summary.seeds],
        "k": summary.k,
        "strategy": summary.strategy,
        "nodes": [{"term": t.to_json(), "frequency": f} for t, f in summary.nodes],
        "triples": [t.to_json() for t in summary.triples],
        "warnings": [w.to_json() for w in summary.warnings],
    }


def to_json(summary: Summary) -> str:
    return json.dumps(to_json_dict(summary), indent=2, ensure_ascii=False) + "\n"
