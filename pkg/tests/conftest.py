from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from negkdv.diffalg import DiffPoly, DVar

settings.register_profile("negkdv", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("negkdv")

coeffs = st.builds(Fraction, st.integers(-6, 6).filter(bool), st.integers(1, 4))


def dvars(names=("u", "f"), max_t=1, max_x=3):
    return st.builds(DVar, st.sampled_from(names), st.integers(0, max_t), st.integers(0, max_x))


def monomials(names=("u", "f"), max_t=1, max_x=3, max_factors=3):
    return st.lists(dvars(names, max_t, max_x), min_size=0, max_size=max_factors)


def _build(terms):
    out = DiffPoly()
    for c, factors in terms:
        m = DiffPoly.constant(c)
        for v in factors:
            m = m * DiffPoly.from_dvar(v)
        out = out + m
    return out


def polys(names=("u", "f"), max_t=1, max_x=3, max_terms=4, max_factors=3):
    return st.lists(st.tuples(coeffs, monomials(names, max_t, max_x, max_factors)),
                    max_size=max_terms).map(_build)


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    def record(number: int, ok: bool, note: str = ""):
        prev_ok, prev_note = _ACCEPTANCE.get(number, (True, ""))
        notes = "; ".join(x for x in (prev_note, note) if x)
        _ACCEPTANCE[number] = (prev_ok and ok, notes)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {note}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, note = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {note}")
