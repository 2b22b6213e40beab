"""Standard MIDI File reader/writer (formats 0 and 1).

Hand-rolled binary codec: chunked layout, big-endian lengths,
variable-length delta times, running status on read. Tempo and velocity
are ignored on read and fixed constants on write (120 BPM, velocity 80).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .errors import MalformedMidi, UnsupportedFormat

WRITE_VELOCITY = 80
WRITE_TEMPO_US = 500_000  # 120 BPM


@dataclass(frozen=True)
class NoteEvent:
    """One sounding note in absolute MIDI ticks."""

    pitch: int
    onset_ticks: int
    duration_ticks: int
    track: int = 0

    def __post_init__(self):
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch {self.pitch} outside 0..127")
        if self.duration_ticks < 1:
            raise ValueError("duration_ticks must be >= 1")


def _read_vlq(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    for _ in range(4):
        if pos >= len(data):
            raise MalformedMidi("truncated variable-length quantity")
        byte = data[pos]
        pos += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, pos
    raise MalformedMidi("variable-length quantity longer than 4 bytes")


def _write_vlq(value: int) -> bytes:
    if value < 0:
        raise ValueError("negative delta time")
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


_DATA_BYTES = {0x80: 2, 0x90: 2, 0xA0: 2, 0xB0: 2, 0xC0: 1, 0xD0: 1, 0xE0: 2}


def _parse_track(data: bytes, track_index: int) -> list[NoteEvent]:
    events: list[NoteEvent] = []
    open_notes: dict[int, list[int]] = {}  # pitch -> onset ticks, FIFO
    pos = 0
    tick = 0
    status = None

    def close(pitch: int, now: int):
        onsets = open_notes.get(pitch)
        if onsets:
            onset = onsets.pop(0)
            events.append(NoteEvent(pitch, onset, max(1, now - onset), track_index))

    while pos < len(data):
        delta, pos = _read_vlq(data, pos)
        tick += delta
        if pos >= len(data):
            raise MalformedMidi("truncated event")
        byte = data[pos]
        if byte >= 0x80:
            status = byte
            pos += 1
        elif status is None:
            raise MalformedMidi("data byte with no running status")

        if status == 0xFF:
            if pos >= len(data):
                raise MalformedMidi("truncated meta event")
            meta_type = data[pos]
            length, pos = _read_vlq(data, pos + 1)
            if pos + length > len(data):
                raise MalformedMidi("truncated meta event payload")
            pos += length
            status = None
            if meta_type == 0x2F:
                break
        elif status in (0xF0, 0xF7):
            length, pos = _read_vlq(data, pos)
            if pos + length > len(data):
                raise MalformedMidi("truncated sysex payload")
            pos += length
            status = None
        elif 0x80 <= status < 0xF0:
            n = _DATA_BYTES[status & 0xF0]
            if pos + n > len(data):
                raise MalformedMidi("truncated channel event")
            d1 = data[pos]
            d2 = data[pos + 1] if n == 2 else 0
            if d1 >= 0x80 or d2 >= 0x80:
                raise MalformedMidi("data byte >= 0x80 in channel event")
            pos += n
            kind = status & 0xF0
            if kind == 0x90 and d2 > 0:
                open_notes.setdefault(d1, []).append(tick)
            elif kind == 0x80 or (kind == 0x90 and d2 == 0):
                close(d1, tick)
        else:
            raise MalformedMidi(f"unexpected status byte 0x{status:02x}")

    # Unmatched note-ons are closed at end of track.
    for pitch, onsets in open_notes.items():
        for onset in onsets:
            events.append(NoteEvent(pitch, onset, max(1, tick - onset), track_index))
    return events


def parse_midi(data: bytes) -> tuple[list[NoteEvent], int]:
    """Parse SMF bytes into note events merged across tracks.

    Returns (events, ticks_per_quarter_note). Events are sorted by
    (onset, pitch, track). Note-on with velocity 0 counts as note-off.
    """
    if len(data) < 14 or data[:4] != b"MThd":
        raise MalformedMidi("missing MThd header")
    header_len, fmt, ntrks, division = struct.unpack(">IHHH", data[4:14])
    if header_len < 6:
        raise MalformedMidi("MThd length < 6")
    if fmt == 2:
        raise UnsupportedFormat("format 2 files are not supported")
    if fmt not in (0, 1):
        raise MalformedMidi(f"unknown SMF format {fmt}")
    if division & 0x8000:
        raise UnsupportedFormat("SMPTE time division is not supported")
    if division == 0:
        raise MalformedMidi("zero ticks per quarter note")

    events: list[NoteEvent] = []
    pos = 8 + header_len
    track_index = 0
    while pos < len(data) and track_index < ntrks:
        if pos + 8 > len(data):
            raise MalformedMidi("truncated chunk header")
        chunk_id = data[pos : pos + 4]
        (chunk_len,) = struct.unpack(">I", data[pos + 4 : pos + 8])
        if pos + 8 + chunk_len > len(data):
            raise MalformedMidi("truncated chunk body")
        body = data[pos + 8 : pos + 8 + chunk_len]
        pos += 8 + chunk_len
        if chunk_id == b"MTrk":
            events.extend(_parse_track(body, track_index))
            track_index += 1
        # Alien chunks are skipped per the SMF spec.
    if track_index == 0:
        raise MalformedMidi("no MTrk chunk found")

    events.sort(key=lambda e: (e.onset_ticks, e.pitch, e.track))
    return events, division


def write_midi(events: list[NoteEvent], ticks_per_quarter: int) -> bytes:
    """Serialize note events as a single-track format-0 SMF."""
    if ticks_per_quarter < 1 or ticks_per_quarter > 0x7FFF:
        raise ValueError("ticks_per_quarter out of range")
    # (tick, order, status, pitch): note-offs sort before note-ons at a tick.
    channel_events = []
    for ev in events:
        channel_events.append((ev.onset_ticks + ev.duration_ticks, 0, 0x80, ev.pitch))
        channel_events.append((ev.onset_ticks, 1, 0x90, ev.pitch))
    channel_events.sort()

    body = bytearray()
    body += _write_vlq(0) + bytes([0xFF, 0x51, 0x03]) + struct.pack(">I", WRITE_TEMPO_US)[1:]
    last_tick = 0
    for tick, _, status, pitch in channel_events:
        body += _write_vlq(tick - last_tick)
        velocity = WRITE_VELOCITY if status == 0x90 else 0x40
        body += bytes([status, pitch, velocity])
        last_tick = tick
    body += _write_vlq(0) + bytes([0xFF, 0x2F, 0x00])

    out = b"MThd" + struct.pack(">IHHH", 6, 0, 1, ticks_per_quarter)
    out += b"MTrk" + struct.pack(">I", len(body)) + bytes(body)
    return out
