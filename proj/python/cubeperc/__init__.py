"""Independent sets in percolated hypercubes: exact counts, fluctuation
statistics, birthday collisions and samplers.

The heavy lifting lives in the C++ extension ``_cubeperc``; this package adds
``run_experiment``, which returns parsed CSV rows and JSON documents.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from ._cubeperc import *  # noqa: F401,F403
from ._cubeperc import __version__, _run_experiment


@dataclass
class ExperimentResult:
    data: str
    summary: dict
    manifest: dict
    passed: bool
    failures: list[str] = field(default_factory=list)

    def rows(self) -> list[dict[str, str]]:
        """CSV rows as dictionaries keyed by column name."""
        return list(csv.DictReader(io.StringIO(self.data)))


def run_experiment(command: str, **options) -> ExperimentResult:
    """Run a CLI subcommand in-process, e.g. ``run_experiment("clt", d=12, p=0.8, instances=100)``.

    Keyword names follow the CLI flags; use ``lam`` for the fugacity.
    """
    data, summary, manifest, passed, failures = _run_experiment(command, options)
    return ExperimentResult(data, json.loads(summary), json.loads(manifest), passed, list(failures))
