import datetime as dt
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from citerank.corpus import CitationNetwork


def make_network(dates, edges, ids=None):
    """Small-network helper: dates as day offsets from 2000-01-01, edges as
    (citing, cited) index pairs referring to the *given* order."""
    base = dt.date(2000, 1, 1).toordinal()
    n = len(dates)
    if ids is None:
        ids = [str(i + 1) for i in range(n)]
    citing = [e[0] for e in edges]
    cited = [e[1] for e in edges]
    net, report = CitationNetwork.build(ids, [base + d for d in dates], citing, cited)
    return net, report


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


def write_tsv(path, rows):
    path.write_text("".join(f"{a}\t{b}\n" for a, b in rows), encoding="utf-8")
    return path
