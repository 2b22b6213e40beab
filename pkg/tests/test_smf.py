import struct

import pytest

from choralegen.errors import MalformedMidi, UnsupportedFormat
from choralegen.smf import NoteEvent, parse_midi, write_midi


def header(fmt=0, ntrks=1, division=480):
    return b"MThd" + struct.pack(">IHHH", 6, fmt, ntrks, division)


def track(body: bytes) -> bytes:
    return b"MTrk" + struct.pack(">I", len(body)) + body


# Single C4 quarter note at tick 0, PPQ 480, built by hand from the SMF
# spec: delta 0, note-on ch0; delta 480 (VLQ 83 60), note-off; end of track.
C4_QUARTER = header() + track(
    bytes([0x00, 0x90, 0x3C, 0x64,
           0x83, 0x60, 0x80, 0x3C, 0x40,
           0x00, 0xFF, 0x2F, 0x00]))


def test_single_c4_quarter_note():
    events, ppq = parse_midi(C4_QUARTER)
    assert ppq == 480
    assert events == [NoteEvent(pitch=60, onset_ticks=0, duration_ticks=480)]


def test_empty_track_yields_no_events():
    data = header() + track(bytes([0x00, 0xFF, 0x2F, 0x00]))
    assert parse_midi(data)[0] == []


def test_running_status_velocity_zero_closes_note():
    # note-on, then running-status note-on with velocity 0 at tick 240
    body = bytes([0x00, 0x90, 0x3C, 0x50,
                  0x81, 0x70, 0x3C, 0x00,
                  0x00, 0xFF, 0x2F, 0x00])
    events, _ = parse_midi(header() + track(body))
    assert events == [NoteEvent(pitch=60, onset_ticks=0, duration_ticks=240)]


def test_unmatched_note_on_closed_at_end_of_track():
    body = bytes([0x00, 0x90, 0x3C, 0x50,
                  0x83, 0x60, 0xFF, 0x2F, 0x00])
    events, _ = parse_midi(header() + track(body))
    assert events == [NoteEvent(pitch=60, onset_ticks=0, duration_ticks=480)]


def test_format_1_merges_tracks():
    t1 = track(bytes([0x00, 0x90, 0x30, 0x50, 0x60, 0x80, 0x30, 0x40,
                      0x00, 0xFF, 0x2F, 0x00]))
    t2 = track(bytes([0x00, 0x90, 0x40, 0x50, 0x60, 0x80, 0x40, 0x40,
                      0x00, 0xFF, 0x2F, 0x00]))
    events, _ = parse_midi(header(fmt=1, ntrks=2) + t1 + t2)
    assert [(e.pitch, e.track) for e in events] == [(0x30, 0), (0x40, 1)]


def test_bad_header_raises():
    with pytest.raises(MalformedMidi):
        parse_midi(b"RIFFxxxxxxxxxxxx")


def test_truncated_chunk_raises():
    with pytest.raises(MalformedMidi):
        parse_midi(C4_QUARTER[:-4])


def test_bad_vlq_raises():
    body = bytes([0xFF, 0xFF, 0xFF, 0xFF, 0xFF])  # 5-byte VLQ
    with pytest.raises(MalformedMidi):
        parse_midi(header() + track(body))


def test_format_2_rejected():
    with pytest.raises(UnsupportedFormat):
        parse_midi(header(fmt=2) + track(bytes([0x00, 0xFF, 0x2F, 0x00])))


def test_smpte_division_rejected():
    with pytest.raises(UnsupportedFormat):
        parse_midi(header(division=0xE250) + track(bytes([0x00, 0xFF, 0x2F, 0x00])))


def test_write_then_parse_round_trip():
    notes = [NoteEvent(60, 0, 480), NoteEvent(64, 0, 240), NoteEvent(67, 480, 480)]
    events, ppq = parse_midi(write_midi(notes, 480))
    assert ppq == 480
    assert sorted((e.pitch, e.onset_ticks, e.duration_ticks) for e in events) == \
        sorted((n.pitch, n.onset_ticks, n.duration_ticks) for n in notes)
