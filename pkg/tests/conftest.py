from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("ci", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


def rationals(max_num: int = 9, max_den: int = 5):
    return st.builds(Fraction, st.integers(-max_num, max_num), st.integers(1, max_den))


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, in criterion order."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid or rep.when != "call" and outcome != "error":
                continue
            name = nodeid.split("::")[-1][len("test_criterion_"):]
            num, _, title = name.partition("_")
            lines.append((int(num), f"criterion {num} {title:<28} {'PASS' if outcome == 'passed' else 'FAIL'}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
