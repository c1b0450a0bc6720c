import random

from hypothesis import HealthCheck, settings, strategies as st

from wittkit.generators import random_poset

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def posets(max_elems=5, max_norm=12, joins=False):
    return seeds.map(lambda s: random_poset(random.Random(s), max_elems, max_norm, joins))


ACCEPTANCE: dict[int, str] = {}


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
