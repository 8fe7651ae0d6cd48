def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in _loaded() if name == "test_acceptance"), None)
    if module is None or not module.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.REPORT, key=lambda text: int(text.split()[2])):
        terminalreporter.write_line(line)


def _loaded():
    import sys
    return list(sys.modules.items())
