import io

import pytest
from hypothesis import given, strategies as st

from flowmotif import (
    FormatError,
    PassEvent,
    group_by_match,
    parse_pass_events,
    serialize_pass_events,
)
from helpers import make_events

CSV_HEADER = "match_id,team_id,passer,receiver,timestamp_s\n"


def parse_csv(body: str):
    return parse_pass_events(io.StringIO(body), "csv")


def test_csv_line_maps_fields_directly():
    result = parse_csv(CSV_HEADER + "M1,T1,p2,p4,12.0\n")
    assert result.diagnostics == ()
    assert result.events == (PassEvent("M1", "T1", "p2", "p4", 12.0),)


def test_empty_stream_is_empty_result():
    for fmt in ("csv", "jsonl"):
        result = parse_pass_events(io.BytesIO(b""), fmt)
        assert result.events == ()
        assert result.diagnostics == ()


def test_self_pass_rejected_with_line_number():
    result = parse_csv(CSV_HEADER + "M1,T1,p2,p4,12.0\nM1,T1,p2,p2,13.0\n")
    assert len(result.events) == 1
    (diag,) = result.diagnostics
    assert diag.line == 3
    assert "self-pass" in diag.reason
    assert str(diag) == f"line=3 reason={diag.reason}"


def test_negative_timestamp_and_bad_float_rejected():
    result = parse_csv(CSV_HEADER + "M1,T1,a,b,-1\nM1,T1,a,b,oops\nM1,T1,a,b,nan\n")
    assert result.events == ()
    assert [d.line for d in result.diagnostics] == [2, 3, 4]


def test_wrong_field_count_rejected():
    result = parse_csv(CSV_HEADER + "M1,T1,a,b\n")
    assert result.events == ()
    assert "expected 5 fields" in result.diagnostics[0].reason


def test_header_mismatch_names_missing_column():
    with pytest.raises(FormatError, match="receiver"):
        parse_csv("match_id,team_id,passer,timestamp_s\nM1,T1,a,0.0\n")


def test_reordered_header_rejected():
    with pytest.raises(FormatError):
        parse_csv("team_id,match_id,passer,receiver,timestamp_s\n")


def test_unknown_format_rejected():
    with pytest.raises(ValueError, match="format"):
        parse_pass_events(io.StringIO(""), "xml")


def test_jsonl_parses_and_collects_diagnostics():
    body = (
        '{"match_id":"M1","team_id":"T1","passer":"a","receiver":"b","timestamp_s":1.5}\n'
        "not json\n"
        '{"match_id":"M1","team_id":"T1","passer":"a","receiver":"a","timestamp_s":2}\n'
        '{"match_id":"M1","team_id":"T1","passer":"a","timestamp_s":2}\n'
        "[1,2]\n"
    )
    result = parse_pass_events(io.StringIO(body), "jsonl")
    assert result.events == (PassEvent("M1", "T1", "a", "b", 1.5),)
    assert [d.line for d in result.diagnostics] == [2, 3, 4, 5]
    assert "missing field receiver" in result.diagnostics[2].reason


def test_pass_event_invariants_enforced():
    with pytest.raises(ValueError, match="self-pass"):
        PassEvent("m", "t", "a", "a", 1.0)
    with pytest.raises(ValueError, match="timestamp"):
        PassEvent("m", "t", "a", "b", -0.5)


ids = st.text(
    st.characters(min_codepoint=32, max_codepoint=0x2FFF, blacklist_characters="\r\n"),
    min_size=1,
    max_size=8,
)
timestamps = st.floats(min_value=0.0, max_value=1e9, allow_nan=False, allow_infinity=False)


@st.composite
def valid_events(draw):
    passer = draw(ids)
    receiver = draw(ids.filter(lambda r: r != passer))
    return PassEvent(draw(ids), draw(ids), passer, receiver, draw(timestamps))


@given(st.lists(valid_events(), max_size=30), st.sampled_from(["csv", "jsonl"]))
def test_parse_serialize_round_trip(events, fmt):
    text = serialize_pass_events(events, fmt)
    result = parse_pass_events(io.StringIO(text), fmt)
    assert result.diagnostics == ()
    assert list(result.events) == events


def test_group_by_match_partitions_by_key():
    events = make_events([("a", "b")] * 3, "M1", "T1") + make_events(
        [("c", "d")] * 2, "M1", "T2"
    )
    logs = group_by_match(events)
    assert [(lg.match_id, lg.team_id, len(lg.events)) for lg in logs] == [
        ("M1", "T1", 3),
        ("M1", "T2", 2),
    ]


def test_group_by_match_sorts_by_timestamp_stably():
    a = PassEvent("m", "t", "x", "y", 5.0)
    b = PassEvent("m", "t", "y", "z", 1.0)
    c = PassEvent("m", "t", "p", "q", 5.0)  # ties with a, must stay after it
    (log,) = group_by_match([a, b, c])
    assert log.events == (b, a, c)


def test_group_by_match_keeps_duplicates():
    ev = PassEvent("m", "t", "x", "y", 1.0)
    (log,) = group_by_match([ev, ev])
    assert log.events == (ev, ev)


def test_group_by_match_empty():
    assert group_by_match([]) == []


@given(st.lists(valid_events(), max_size=40))
def test_group_sizes_sum_to_input_size(events):
    logs = group_by_match(events)
    assert sum(len(lg.events) for lg in logs) == len(events)
