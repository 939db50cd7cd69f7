"""The eleven acceptance criteria at their stated tolerances.

Each test prints a single PASS/FAIL line with the measured values.  Run
``python tests/test_acceptance.py`` to get just those lines.
"""

import pytest

from charsums.acceptance import CRITERIA


@pytest.mark.parametrize("cid", sorted(CRITERIA))
def test_criterion(cid, capsys):
    result = CRITERIA[cid]()
    with capsys.disabled():
        print("\n" + result.line(), flush=True)
    assert result.passed, result.line()


if __name__ == "__main__":
    for cid in sorted(CRITERIA):
        print(CRITERIA[cid]().line(), flush=True)
