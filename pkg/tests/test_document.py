import json

import pytest

from lectern.document import (
    MalformedDocument,
    UnknownVersion,
    dumps_document,
    parse_document,
)
from lectern.session import IntegrityMismatch, Session, SessionEvent, replay_text


def sample_session():
    session = Session(duration_s=1800.0)
    events = [
        (1, 0, "clock-play", {}),
        (2, 100, "stroke-begin", {"x_mm": 20.0, "y_mm": 30.0}),
        (3, 150, "stroke-point", {"x_mm": 25.0, "y_mm": 35.0, "pressure": 0.5}),
        (4, 200, "stroke-end", {}),
        (5, 300, "clock-pause", {}),
        (6, 350, "slider-seek", {"t_s": 99.5}),
    ]
    for seq, wall, kind, payload in events:
        outcome = session.apply(SessionEvent(seq, wall, kind, payload))
        assert outcome.status == "applied", outcome.reason
    return session


def test_serialize_deserialize_serialize_is_byte_identical():
    session = sample_session()
    text1 = session.export_text()
    doc = parse_document(text1)
    text2 = dumps_document(doc)
    assert text2 == text1
    doc2 = parse_document(text2)
    assert dumps_document(doc2) == text1


def test_export_is_deterministic_across_sessions():
    assert sample_session().export_text() == sample_session().export_text()


def test_empty_session_is_minimal_document():
    text = Session(duration_s=60.0).export_text()
    doc = parse_document(text)
    assert doc["version"] == 1
    assert doc["lecture"]["duration_s"] == 60.0
    assert len(doc["pages"]) == 1
    assert doc["pages"][0]["strokes"] == []
    assert doc["pages"][0]["pictures"] == []
    assert doc["events"] == []


def test_truncated_document_is_malformed():
    text = sample_session().export_text()
    with pytest.raises(MalformedDocument):
        parse_document(text[: len(text) // 2])


def test_missing_field_reports_location():
    doc = json.loads(sample_session().export_text())
    del doc["pages"][0]["strokes"][0]["width_mm"]
    with pytest.raises(MalformedDocument) as excinfo:
        parse_document(json.dumps(doc))
    assert "width_mm" in str(excinfo.value)
    assert excinfo.value.location.startswith("$.pages[0].strokes[0]")


def test_unknown_version():
    doc = json.loads(sample_session().export_text())
    doc["version"] = 99
    with pytest.raises(UnknownVersion):
        parse_document(json.dumps(doc))


def test_replay_round_trip_matches():
    session = sample_session()
    text = session.export_text()
    replayed = replay_text(text)
    assert replayed.export_text() == text


def test_hand_edited_timestamp_fails_integrity():
    text = sample_session().export_text()
    doc = json.loads(text)
    doc["pages"][0]["strokes"][0]["points"][0]["t_lecture_s"] += 1.0
    with pytest.raises(IntegrityMismatch) as excinfo:
        replay_text(dumps_document(doc))
    assert "t_lecture_s" in excinfo.value.location


def test_event_seq_must_increase():
    doc = json.loads(sample_session().export_text())
    doc["events"][2]["seq"] = 1
    with pytest.raises(MalformedDocument):
        parse_document(json.dumps(doc))


def test_fixed_decimal_rendering():
    text = sample_session().export_text()
    assert '"duration_s": 1800.000' in text
    assert '"x_mm": 20.000' in text
    assert '"pressure": 0.500' in text
