from urllib.parse import quote

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isummary.terms import iri, literal
from isummary.workload import EmptyWorkload, IoError, load_workload

from conftest import UNIVERSITY_QUERIES, store_from_texts


def test_load_raw_lines(university_file):
    store = load_workload(university_file, format="raw-lines")
    assert len(store) == 5
    assert store.rejected_count == 0
    assert [q.id for q in store.queries] == [0, 1, 2, 3, 4]
    assert store.query(2).source_line == 3


def test_empty_file_rejected(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("", encoding="utf-8")
    with pytest.raises(EmptyWorkload):
        load_workload(path, format="raw-lines")


def test_missing_path():
    with pytest.raises(IoError):
        load_workload("/no/such/file.txt", format="raw-lines")


def test_garbage_lines_counted(tmp_path, caplog):
    path = tmp_path / "log.txt"
    path.write_text(
        "SELECT ?x WHERE {?x a Person}\n"
        "not sparql\n"
        "SELECT ?y WHERE {?y a Robot}\n"
        "also || not % sparql\n"
        "SELECT ?z WHERE {?z a Alien}\n",
        encoding="utf-8",
    )
    with caplog.at_level("WARNING"):
        store = load_workload(path, format="raw-lines")
    assert len(store) == 3
    assert store.rejected_count == 2
    assert "line 2" in caplog.text and "line 4" in caplog.text


def test_urlencoded_lines(tmp_path):
    encoded = quote("SELECT ?x WHERE {?x a Person. ?x name \"Ann Smith\"}")
    path = tmp_path / "log.txt"
    path.write_text(encoded + "\n", encoding="utf-8")
    store = load_workload(path, format="urlencoded-lines")
    assert len(store) == 1
    assert store.query(0).patterns[1].object == literal("Ann Smith")


def test_rq_directory_lexicographic(tmp_path):
    (tmp_path / "b.rq").write_text("SELECT ?x WHERE {?x a Robot}", encoding="utf-8")
    (tmp_path / "a.rq").write_text("SELECT ?x WHERE {?x a Person}", encoding="utf-8")
    (tmp_path / "ignored.txt").write_text("junk", encoding="utf-8")
    store = load_workload(tmp_path, format="rq-directory")
    assert [q.patterns[0].object for q in store.queries] == [iri("Person"), iri("Robot")]


def test_tsv_with_failing_header(tmp_path):
    path = tmp_path / "log.tsv"
    path.write_text(
        "timestamp\tquery\n"
        "123\tSELECT ?x WHERE {?x a Person}\n"
        "456\tbroken\n",
        encoding="utf-8",
    )
    store = load_workload(path, format="tsv", tsv_column=1)
    assert len(store) == 1
    assert store.rejected_count == 1  # header skip is not a rejection


def test_tsv_column_flag_validation(tmp_path, university_file):
    with pytest.raises(ValueError):
        load_workload(university_file, format="raw-lines", tsv_column=1)
    with pytest.raises(ValueError):
        load_workload(university_file, format="tsv")


def test_deterministic_reload(university_file):
    a = load_workload(university_file, format="raw-lines")
    b = load_workload(university_file, format="raw-lines")
    assert [q.patterns for q in a.queries] == [q.patterns for q in b.queries]
    assert a.term_index == b.term_index


# -- filter ------------------------------------------------------------------

def test_filter_person(university_store):
    assert university_store.filter([iri("Person")]) == [0, 1, 2]


def test_filter_publication(university_store):
    assert university_store.filter([iri("Publication")]) == [4]


def test_filter_empty_set_matches_all(university_store):
    assert university_store.filter([]) == [0, 1, 2, 3, 4]


def test_filter_predicate_and_literal_positions(university_store):
    assert university_store.filter([iri("advisor")]) == [0]
    assert university_store.filter([literal("FORTH")]) == [2]


def test_filter_conjunction(university_store):
    assert university_store.filter([iri("Person"), iri("Organization")]) == [1, 2]
    assert university_store.filter([iri("Person"), iri("Publication")]) == []


def test_filter_requires_concrete(university_store):
    from isummary.terms import variable

    with pytest.raises(ValueError):
        university_store.filter([variable("x")])


def test_term_index_matches_linear_scan(university_store):
    for term, ids in university_store.term_index.items():
        scanned = {
            q.id
            for q in university_store.queries
            if any(term in p.terms() for p in q.patterns)
        }
        assert ids == scanned
    # no phantom entries: every indexed term occurs somewhere
    all_terms = {
        t for q in university_store.queries for p in q.patterns for t in p.terms()
        if t.concrete
    }
    assert set(university_store.term_index) == all_terms


def test_subset_preserves_ids(university_store):
    sub = university_store.subset([1, 3])
    assert [q.id for q in sub.queries] == [1, 3]
    assert sub.filter([iri("Organization")]) == [1, 3]


_vocab = [iri(n) for n in ("A", "B", "C", "D")] + [literal("x")]


@settings(max_examples=100, deadline=None)
@given(
    a=st.sets(st.sampled_from(_vocab), max_size=3),
    b=st.sets(st.sampled_from(_vocab), max_size=3),
)
def test_filter_conjunction_property(a, b):
    store = store_from_texts(UNIVERSITY_QUERIES + [
        "SELECT ?x WHERE {A p B. C q D}",
        'SELECT ?x WHERE {?x p "x". A q ?x}',
        "SELECT ?x WHERE {B p D}",
    ])
    union = set(store.filter(a | b))
    both = set(store.filter(a)) & set(store.filter(b))
    assert union == both
