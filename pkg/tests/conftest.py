ACCEPTANCE_LINES = []


def record(tag: str, ok: bool, detail: str) -> str:
    line = f"{tag}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    # surface the per-criterion verdicts even when every test passes
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)
