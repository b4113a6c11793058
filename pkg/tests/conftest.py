import pytest

# Verdict lines collected by the release-gate tests; printed after the run
# so output capture cannot swallow them.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)


TWO_CARS_TEXT = (
    "The distance between city A and B is 660 km, the car starting from A "
    "drives 32 km/h, and the car starting from B drives 34 km/h. The two cars "
    "are starting from the two places at the same time heading toward each "
    "other. How many hours later would the two cars meet?"
)

TWO_CARS_REVERSED_TEXT = (
    "The car starting from A drives 32 km/h, and the car starting from B "
    "drives 34 km/h. The two cars are starting from the two places at the "
    "same time heading toward each other. 10 hours later the two cars would "
    "meet. What is the distance between city A and B?"
)


@pytest.fixture
def two_cars_record():
    return {
        "id": "demo-1",
        "original_text": TWO_CARS_TEXT,
        "equation": "x=660/(32+34)",
        "ans": "10",
    }
