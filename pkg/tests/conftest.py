import os

import numpy as np
import pytest

from choralegen.pianoroll import PianoRoll, parse_pianoroll_text

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

# Major-scale helpers for chorale-like synthetic pieces: four voices,
# chords changing every four steps, a random-walk melody on top.
_SCALE = [0, 2, 4, 5, 7, 9, 11]
_PROGRESSION = [0, 5, 3, 4, 0, 3, 1, 4, 0, 5, 3, 4, 1, 4, 4, 0]


def _degree(base, k):
    return base + 12 * (k // 7) + _SCALE[k % 7]


def chorale_piece(seed: int, length: int = 32) -> PianoRoll:
    rng = np.random.Generator(np.random.PCG64(seed))
    frames = np.zeros((length, 88))
    mel = 10
    for t in range(length):
        chord = _PROGRESSION[(t // 4) % 16]
        mel = int(np.clip(mel + rng.integers(-2, 3), 0, 20))
        pitches = (_degree(36, chord), _degree(48, chord + 2),
                   _degree(48, chord + 4), _degree(60, mel))
        for p in pitches:
            frames[t, p - 21] = 1.0
    return PianoRoll(frames, source_id=f"piece{seed:02d}")


def random_roll(rng: np.random.Generator, num_frames: int = 8,
                density: float = 0.06) -> PianoRoll:
    frames = (rng.uniform(0, 1, (num_frames, 88)) < density).astype(float)
    return PianoRoll(frames, source_id="random")


@pytest.fixture(scope="session")
def chorale64() -> PianoRoll:
    with open(os.path.join(DATA_DIR, "chorale64.txt")) as fh:
        return parse_pianoroll_text(fh.read(), source_id="chorale64")
