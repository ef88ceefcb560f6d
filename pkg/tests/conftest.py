import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call" or "test_acceptance" not in str(item.fspath):
        return
    status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(rep.outcome, rep.outcome)
    tr = item.config.pluginmanager.get_plugin("terminalreporter")
    if tr is not None:
        tr.write_line(f"ACCEPTANCE {item.name}: {status}")
