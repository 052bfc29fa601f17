import os

# keep test runs single-process unless the caller asks otherwise
os.environ.setdefault("BASIN_INFER_WORKERS", "1")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
