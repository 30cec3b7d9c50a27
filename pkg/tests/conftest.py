from __future__ import annotations

import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from annular_rasmussen.braid import BraidWord

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# lines reported by the acceptance tests, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@st.composite
def braids(draw, max_strands=3, max_letters=5, min_strands=1):
    n = draw(st.integers(min_strands, max_strands))
    if n == 1:
        return BraidWord(1, ())
    gens = st.integers(1, n - 1).flatmap(lambda i: st.sampled_from([i, -i]))
    letters = draw(st.lists(gens, max_size=max_letters))
    return BraidWord(n, tuple(letters))


def random_word(rng: random.Random, n: int, length: int) -> BraidWord:
    if n == 1:
        return BraidWord(1, ())
    return BraidWord(n, tuple(rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(length)))


def random_qp_word(rng: random.Random, max_strands=4, max_letters=9) -> BraidWord:
    """Product of conjugates g s_i g^-1 of positive generators."""
    n = rng.randint(2, max_strands)
    letters: list[int] = []
    while True:
        g = random_word(rng, n, rng.randint(0, 2))
        band = g.letters + (rng.randint(1, n - 1),) + g.inverse().letters
        if letters and len(letters) + len(band) > max_letters:
            break
        if len(band) <= max_letters - len(letters):
            letters.extend(band)
        if rng.random() < 0.3:
            break
    return BraidWord(n, tuple(letters))


def sympy_rank(rows) -> int:
    """Exact rank over Q by sympy's sparse elimination (independent of our linalg)."""
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    if not rows or not rows[0]:
        return 0
    entries = {i: {j: QQ(v) for j, v in enumerate(r) if v} for i, r in enumerate(rows)}
    entries = {i: r for i, r in entries.items() if r}
    return DomainMatrix(entries, (len(rows), len(rows[0])), QQ).rank()
