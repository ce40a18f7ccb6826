import pytest

COVERAGE_THRESHOLD = 90


def _test(coverage: bool = False, quick: bool = False) -> int:
    """
    Run library tests, located in `tests/` dir.

    :param coverage: Measure coverage of `regimecalc` and fail under the threshold
    :param quick: Deselect 'slow' marked tests (simulation sweeps and large samples)
    """
    args = ["tests/"]
    if quick:
        args = ["-m", "not slow", *args]
    if coverage:
        args = [
            f"--cov-fail-under={COVERAGE_THRESHOLD}",
            "--cov-report",
            "html",
            "--cov-report",
            "term",
            "--cov=regimecalc",
            *args,
        ]
    else:
        args = ["--tb=long", "-vv", "--cache-clear", *args]
    return pytest.main(args)


def quick_test():
    exit(_test(quick=True))


def quick_test_coverage():
    exit(_test(coverage=True, quick=True))


def test_no_cov():
    exit(_test())


def test_all():
    exit(_test(coverage=True))
