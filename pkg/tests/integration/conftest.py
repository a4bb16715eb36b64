# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

import pytest


def pytest_addoption(parser: pytest.Parser) -> None:
    """Add options to the pytest command line.

    This is a pytest hook that is called when the pytest command line is being parsed.

    Args:
      parser: The pytest command line parser.
    """
    parser.addoption(
        "--suite_workers",
        action="store",
        default="1",
        help="Worker processes used by the verify command",
    )
    parser.addoption(
        "--suite_seed", action="store", default="0", help="Seed passed to the verify command"
    )


def pytest_configure(config: pytest.Config) -> None:
    """Validate the options provided by the user.

    This is a pytest hook that is called after command line options have been parsed.

    Args:
      config: The pytest configuration object.
    """
    for option in ("--suite_workers", "--suite_seed"):
        value = str(config.getoption(option))
        if not value.isdigit():
            pytest.exit(f"The {option} option must be a nonnegative integer, got {value}")
    if int(config.getoption("--suite_workers")) < 1:
        pytest.exit("The --suite_workers option must be at least 1. Tests aborted.")


@pytest.fixture(scope="session")
def suite_workers(request: pytest.FixtureRequest) -> int:
    return int(request.config.getoption("--suite_workers"))


@pytest.fixture(scope="session")
def suite_seed(request: pytest.FixtureRequest) -> int:
    return int(request.config.getoption("--suite_seed"))
