import numpy as np
import pytest

from hybridrank.ingest import (ColumnMap, EmptyDatasetError, IngestConfig, ParseError,
                               RawInteraction, SyntheticConfig, attachment_weights,
                               generate_synthetic, parse_interactions, preprocess, read_edge_file,
                               synthetic_arrays, synthetic_graph, write_edge_file)
from hybridrank.temporal_graph import TemporalEdge

DAY = 86400.0
LOOSE = IngestConfig(min_actor_activity=0)


def rec(a, o, v, ts):
    return RawInteraction(a, o, v, ts)


def test_rating_threshold_is_strict():
    out = preprocess([rec("u", "a", 2, 0.0), rec("u", "b", 3, DAY), rec("u", "c", None, 2 * DAY)], LOOSE)
    assert [e.target for e in out] == ["b", "c"]
    assert [e.time for e in out] == [0.0, 1.0]


def test_self_links_dropped_before_activity_count():
    recs = [rec("u", "u", 5, 0.0)] * 3 + [rec("u", "a", 5, DAY)]
    with pytest.raises(EmptyDatasetError):
        preprocess(recs, IngestConfig(min_actor_activity=2))
    kept = preprocess(recs, IngestConfig(min_actor_activity=2, exclude_self_links=False))
    assert len(kept) == 4


def test_activity_floor():
    recs = [rec("u", str(i), 5, i * DAY) for i in range(20)] + [rec("v", "x", 5, 0.0)]
    out = preprocess(recs)
    assert {e.source for e in out} == {"u"}
    assert len(out) == 20


def test_empty_dataset():
    with pytest.raises(EmptyDatasetError):
        preprocess([rec("u", "a", 1, 0.0)], LOOSE)


def test_day_origin_is_earliest_surviving_record():
    recs = [rec("u", "a", 1, 0.0), rec("u", "b", 5, 10 * DAY), rec("u", "c", 5, 13.5 * DAY)]
    assert [e.time for e in preprocess(recs, LOOSE)] == [0.0, 3.5]


def test_parse_file(tmp_path):
    p = tmp_path / "log.txt"
    p.write_text("# comment\n1 10 5 86400\n\n2 10 1 0\n2 11 4 172800\n")
    out = parse_interactions(p, LOOSE, ColumnMap(0, 1, 2, 3))
    assert out == [TemporalEdge("1", "10", 0.0), TemporalEdge("2", "11", 1.0)]


def test_parse_error_reports_line(tmp_path):
    p = tmp_path / "log.txt"
    p.write_text("1 2 3\n1 2 oops\n")
    with pytest.raises(ParseError, match=r":2:") as info:
        parse_interactions(p, LOOSE)
    assert info.value.line_no == 2


def test_header_named_columns(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("when,who,what\n0,u,a\n2,u,b\n")
    out = parse_interactions(p, IngestConfig(min_actor_activity=0, time_unit="days"),
                             ColumnMap("who", "what", None, "when"), delimiter=",", header=True)
    assert [(e.source, e.target, e.time) for e in out] == [("u", "a", 0.0), ("u", "b", 2.0)]
    with pytest.raises(ParseError):
        parse_interactions(p, LOOSE, ColumnMap("who", "nope", None, "when"), ",", True)


def test_edge_file_round_trip(tmp_path):
    edges = [TemporalEdge("a", "b", 0.0), TemporalEdge("b", "c", 1.25), TemporalEdge("c", "a", 2.1234567)]
    p = tmp_path / "e.tsv"
    write_edge_file(p, edges)
    back = read_edge_file(p)
    assert [(e.source, e.target) for e in back] == [("a", "b"), ("b", "c"), ("c", "a")]
    assert [e.time for e in back] == [0.0, 1.25, 2.123457]
    assert p.read_text().splitlines()[1] == "b\tc\t1.250000"


def test_edge_file_errors(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("a\tb\n")
    with pytest.raises(ParseError):
        read_edge_file(p)
    p.write_text("\n")
    with pytest.raises(EmptyDatasetError):
        read_edge_file(p)


def test_generator_deterministic():
    cfg = SyntheticConfig(node_arrival_rate=3, event_rate=20, horizon=40, seed=7)
    a, b = generate_synthetic(cfg), generate_synthetic(cfg)
    assert a == b
    assert a != generate_synthetic(SyntheticConfig(3, 20, 40, seed=8))
    assert all(e.source != e.target for e in a)
    assert all(e.time == int(e.time) and 0 <= e.time < 40 for e in a)
    assert [(e.time, e.source, e.target) for e in a] == sorted((e.time, e.source, e.target) for e in a)


def test_generator_graph_matches_edges():
    cfg = SyntheticConfig(node_arrival_rate=3, event_rate=20, horizon=30, seed=1)
    g = synthetic_graph(cfg)
    assert g.edges() == generate_synthetic(cfg)


def test_pure_degree_attachment_ignores_aging():
    k = np.array([0.0, 3.0, 10.0])
    r = np.array([5.0, 0.0, 1.0])
    w1 = attachment_weights(SyntheticConfig(recency_weight=1.0, aging_rate=0.1), k, r)
    w2 = attachment_weights(SyntheticConfig(recency_weight=1.0, aging_rate=5.0), k, r)
    assert w1.tolist() == w2.tolist() == [1.0, 4.0, 11.0]
    a = synthetic_arrays(SyntheticConfig(5, 40, 30, recency_weight=1.0, aging_rate=0.0, seed=3))
    b = synthetic_arrays(SyntheticConfig(5, 40, 30, recency_weight=1.0, aging_rate=2.0, seed=3))
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


@pytest.mark.parametrize("kwargs", [dict(recency_weight=1.5), dict(aging_rate=-1),
                                    dict(horizon=0), dict(event_rate=-1), dict(initial_nodes=-1)])
def test_generator_validation(kwargs):
    with pytest.raises(ValueError):
        SyntheticConfig(**kwargs)


def test_recent_degree_predicts_better_under_pure_recency():
    """With attachment driven only by recent degree, last month's gain beats total degree."""
    wins, r_recent, r_total = 0, [], []
    for seed in range(20):
        g = synthetic_graph(SyntheticConfig(node_arrival_rate=0.25, event_rate=20, horizon=200,
                                            recency_weight=0.0, aging_rate=0.1, seed=seed))
        n = g.nodes_before(100)
        dst, time = g.dst, g.time
        before = (time < 100) & (dst < n)
        total = np.bincount(dst[before], minlength=n)
        recent = np.bincount(dst[before & (time >= 70)], minlength=n)
        future = np.bincount(dst[(time >= 100) & (time < 130) & (dst < n)], minlength=n)
        r_recent.append(np.corrcoef(recent, future)[0, 1])
        r_total.append(np.corrcoef(total, future)[0, 1])
        wins += r_recent[-1] > r_total[-1]
    assert np.mean(r_recent) > np.mean(r_total)
    assert wins >= 15
