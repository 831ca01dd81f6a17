import pytest

from segrenum.newton import MonomialIdeal

# bivariate and trivariate test corpus: name -> (n, generators, Segre numbers)
CORPUS = {
    "x2,xy": (2, [(2, 0), (1, 1)], (0, 1, 2)),
    "x2,y3": (2, [(2, 0), (0, 3)], (0, 0, 6)),
    "x2,y2": (2, [(2, 0), (0, 2)], (0, 0, 4)),
    "x3,y3": (2, [(3, 0), (0, 3)], (0, 0, 9)),
    "x,y": (2, [(1, 0), (0, 1)], (0, 0, 1)),
    "x": (2, [(1, 0)], (0, 1, 0)),
    "x2,xy,xz": (3, [(2, 0, 0), (1, 1, 0), (1, 0, 1)], (0, 1, 1, 2)),
}
BIVARIATE = [k for k, v in CORPUS.items() if v[0] == 2]


def ideal(name: str) -> MonomialIdeal:
    n, gens, _ = CORPUS[name]
    return MonomialIdeal(n, tuple(gens))


@pytest.fixture(params=list(CORPUS))
def corpus_ideal(request):
    return request.param, ideal(request.param), CORPUS[request.param][2]


# acceptance bookkeeping: test_acceptance records one line per criterion
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        status, text = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {text}")
