import pytest

from tfglab.words import fibonacci_source


@pytest.fixture()
def fib():
    return fibonacci_source()


def brute_factors(text: str, n: int) -> set:
    """Independent factor enumerator: plain substring collection."""
    return {text[i:i + n] for i in range(len(text) - n + 1)}


def brute_recurrence(text: str, n: int) -> int:
    """Independent recurrence oracle over a finite window.

    Least M such that every length-M window of `text` contains every
    length-n factor of `text`.  Sound for windows long enough to show two
    full recurrence cycles; tests pick such windows.
    """
    all_factors = brute_factors(text, n)
    m = n
    while True:
        ok = all(
            brute_factors(text[i:i + m], n) == all_factors
            for i in range(len(text) - m + 1)
        )
        if ok:
            return m
        m += 1


def fib_prefix(length: int) -> str:
    w = "a"
    while len(w) < length:
        w = "".join("ab" if c == "a" else "a" for c in w)
    return w[:length]
