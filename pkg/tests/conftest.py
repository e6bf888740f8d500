import json

import pytest

from topodecide.topology import MessageCopy

CROSSED = [((1, 4, 8), 1), ((2, 5, 8), 0), ((2, 6, 9), 0), ((3, 7, 9), 1)]


def _disjoint7():
    sizes1, sizes0 = (1, 8, 15), (6, 6, 6, 6)
    nxt = iter(range(1, 1000))
    out = [(tuple(next(nxt) for _ in range(s)), 1) for s in sizes1]
    out += [(tuple(next(nxt) for _ in range(s)), 0) for s in sizes0]
    return out


DISJOINT7 = _disjoint7()


def as_copies(spec):
    return [MessageCopy(c, path) for path, c in spec]


@pytest.fixture
def crossed():
    return as_copies(CROSSED)


@pytest.fixture
def disjoint7():
    return as_copies(DISJOINT7)


def write_scenario(path, spec, **extra):
    data = {"copies": [{"content": c, "path": list(p)} for p, c in spec], **extra}
    path.write_text(json.dumps(data))
    return path
