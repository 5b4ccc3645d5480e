import time

import pytest

from eudkit import data
from eudkit.conllu import read_conllu

# (criterion, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE.append((name, bool(passed), detail))
    print(f"[acceptance] {'PASS' if passed else 'FAIL'} {name}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")


@pytest.fixture(scope="session")
def toy_run():
    """One full training run on the bundled toy corpus, shared between tests."""
    from eudkit.predictor.train import Hyper, evaluate_toy, train_toy

    train = read_conllu(data.path("toy_train.conllu"))
    heldout = read_conllu(data.path("toy_heldout.conllu"))
    hyper = Hyper()
    start = time.process_time()
    result = train_toy(train, hyper)
    seconds = time.process_time() - start
    report = evaluate_toy(result.params, heldout, hyper.threshold)
    return {"hyper": hyper, "result": result, "report": report, "seconds": seconds, "train": train}
