import os
import subprocess
import sys

import pytest
from click.testing import CliRunner
from hypothesis import HealthCheck, settings

from latticecalc.cli import main

settings.register_profile("lattice", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lattice")


@pytest.fixture
def cli():
    """Invoke the CLI in-process; returns the click ``Result``."""
    runner = CliRunner()

    def run(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return run


@pytest.fixture
def cli_process():
    """Run ``python -m latticecalc`` in a subprocess with extra environment variables."""

    def run(*args, env=None):
        full = dict(os.environ, **(env or {}))
        return subprocess.run([sys.executable, "-m", "latticecalc", *map(str, args)],
                              capture_output=True, text=True, env=full, timeout=300)

    return run
