from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import pytest

from firegraph import graph_from_text

# family text -> audit radius kept small where balls blow up
AUDIT_FAMILIES = {
    "square": 5,
    "tri": 4,
    "hex": 6,
    "strong": 4,
    "lattice:d=3": 4,
    "orthant:d=3": 4,
    "tree:delta=3": 6,
    "hyper37": 4,
    "subexp": 8,
    "power:k=2(square)": 3,
}


@pytest.fixture(params=sorted(AUDIT_FAMILIES))
def audited(request):
    text = request.param
    return graph_from_text(text), AUDIT_FAMILIES[text]
