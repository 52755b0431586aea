import itertools

import numpy as np
from hypothesis import settings
from hypothesis import strategies as st

from quadlink.quad import QuadLinkage

# first calls warm lru caches; wall-clock deadlines would make that flaky
settings.register_profile("quadlink", deadline=None)
settings.load_profile("quadlink")


def well_separated(lengths, margin=0.05):
    """Exists, and every signed sum a±b±c±d is at least ``margin * max`` away from 0."""
    a, b, c, d = lengths
    m = max(lengths)
    if 2 * m >= a + b + c + d - margin * m:
        return False
    for s in itertools.product((1, -1), repeat=3):
        if abs(a + s[0] * b + s[1] * c + s[2] * d) < margin * m:
            return False
    return True


length = st.floats(0.3, 6.0, allow_nan=False).map(lambda x: round(x, 3))
linkages = st.tuples(length, length, length, length).filter(well_separated).map(lambda t: QuadLinkage(*t))


def random_linkages(count, seed, connected=None):
    """Deterministic sample of well-separated linkages, optionally filtered by connectedness."""
    from quadlink.quad import is_connected

    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        t = tuple(np.round(rng.uniform(0.3, 6.0, 4), 3))
        if not well_separated(t):
            continue
        l = QuadLinkage(*map(float, t))
        if connected is None or is_connected(l) == connected:
            out.append(l)
    return out


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
