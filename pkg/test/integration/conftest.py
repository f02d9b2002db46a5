#!/usr/bin/env python3
"""
Pytest configuration for integration tests.

Integration tests drive the command-line runner end to end: real input files,
the shipped YAML configuration and certificates written to disk.
"""

import pytest
import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent / 'src'))

from cli import RunConfig, main, run_command  # noqa: E402
from config_loader import ConfigLoader  # noqa: E402


@pytest.fixture(scope="session")
def config_loader(config_dir):
    """ConfigLoader over the shipped config/ directory."""
    return ConfigLoader(str(config_dir))


@pytest.fixture
def run(config_loader):
    """Run a command in-process and return its Report.

    Bar resolutions stop at degree 2 unless a test asks for more; metrics are off.
    """
    def _run(command, inputs=(), **kwargs):
        kwargs.setdefault("max_bar_degree", 2)
        kwargs.setdefault("metrics", False)
        cfg = RunConfig(command=command, inputs=[Path(p) for p in inputs], **kwargs)
        return run_command(cfg, config_loader)
    return _run


@pytest.fixture
def cli(config_dir, capsys):
    """Invoke main() with argv and return (exit status, stdout)."""
    def _cli(*argv):
        status = main([*argv, "--config-dir", str(config_dir)])
        return status, capsys.readouterr().out
    return _cli


@pytest.fixture
def grp_file(tmp_path):
    """Write an input file and return its path."""
    def _write(text, name="input.grp"):
        path = tmp_path / name
        path.write_text(text)
        return path
    return _write
