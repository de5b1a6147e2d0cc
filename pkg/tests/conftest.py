import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sudense.words import Word

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=300,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def letters(d: int):
    return st.sampled_from([i for i in range(-d, d + 1) if i])


@st.composite
def words(draw, d=None, max_len=8, min_len=0):
    if d is None:
        d = draw(st.integers(2, 4))
    raw = draw(st.lists(letters(d), min_size=min_len, max_size=max_len))
    return Word(d, tuple(raw))


@st.composite
def word_pairs(draw, max_len=8):
    d = draw(st.integers(2, 4))
    return draw(words(d, max_len)), draw(words(d, max_len))


@st.composite
def word_triples(draw, max_len=8):
    d = draw(st.integers(2, 4))
    return draw(words(d, max_len)), draw(words(d, max_len)), draw(words(d, max_len))
