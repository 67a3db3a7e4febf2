import numpy as np
import pytest
from hypothesis import given

from props import systems
from pidkit.io import (DistributionFileError, distribution_from_json, distribution_to_json, format_distribution,
                       load_distribution, parse_distribution, save_distribution)
from pidkit.systems import get_example

AND_TEXT = """\
# two-input AND
vars 3
cards 2 2 2
0 0 0 0.25   # trailing comment
0 1 0 0.25
1 0 0 0.25
1 1 1 0.25
"""


def test_parse_and():
    d = parse_distribution(AND_TEXT)
    assert np.array_equal(d.probs, get_example("and").probs)
    assert d.target_index == 2


def test_target_is_one_based():
    d = parse_distribution("vars 2\ncards 2 3\ntarget 1\n0 0 0.5\n1 2 0.5\n")
    assert d.target_index == 0


@given(systems())
def test_text_roundtrip(d):
    back = parse_distribution(format_distribution(d))
    assert np.array_equal(back.probs, d.probs)


@given(systems())
def test_json_roundtrip(d):
    back = distribution_from_json(distribution_to_json(d))
    assert np.array_equal(back.probs, d.probs)
    assert back.labels == d.labels


def test_roundtrip_keeps_nonlast_target():
    d = parse_distribution("vars 2\ncards 2 2\ntarget 1\n0 0 0.5\n1 1 0.5\n")
    assert parse_distribution(format_distribution(d)).target_index == 0
    assert distribution_from_json(distribution_to_json(d)).target_index == 0


@pytest.mark.parametrize("text,line,msg", [
    ("cards 2 2\n", 1, "must follow 'vars'"),
    ("vars 2\nvars 2\n", 2, "single 'vars k'"),
    ("vars 2\ncards 2\n", 2, "positive cardinalities"),
    ("vars 2\ncards 2 2\n0 0\n", 3, "values and a probability"),
    ("vars 2\ncards 2 2\n0 2 1.0\n", 3, "outside alphabet"),
    ("vars 2\ncards 2 2\n0 0 x\n", 3, "bad probability"),
    ("vars 2\ncards 2 2\n0 0 -0.5\n", 3, "non-negative"),
    ("vars 2\ncards 2 2\n0 0 0.5\n0 0 0.5\n", 4, "duplicate"),
    ("vars 2\ncards 2 2\ntarget 3\n", 3, "target must be"),
    ("0 0 1\n", 1, "must follow"),
])
def test_parse_errors_carry_line(text, line, msg):
    with pytest.raises(DistributionFileError, match=msg) as info:
        parse_distribution(text)
    assert info.value.line == line


def test_parse_sum_error():
    with pytest.raises(DistributionFileError, match="sum to"):
        parse_distribution("vars 1\ncards 2\n0 0.5\n1 0.4\n")
    with pytest.raises(DistributionFileError, match="no outcome rows"):
        parse_distribution("vars 1\ncards 2\n")
    with pytest.raises(DistributionFileError, match="header"):
        parse_distribution("# empty\n")


def test_json_errors():
    with pytest.raises(DistributionFileError):
        distribution_from_json("{not json")
    with pytest.raises(DistributionFileError, match="wrong length"):
        distribution_from_json('{"cards": [2], "rows": [[0, 0, 1.0]]}')
    with pytest.raises(DistributionFileError, match="duplicate"):
        distribution_from_json('{"cards": [2], "rows": [[0, 0.5], [0, 0.5]]}')
    with pytest.raises(DistributionFileError, match="vars"):
        distribution_from_json('{"vars": 3, "cards": [2], "rows": [[0, 1.0]]}')


def test_save_and_load(tmp_path):
    d = get_example("reducedor")
    for name in ("sys.txt", "sys.json"):
        path = tmp_path / name
        save_distribution(d, path)
        assert np.array_equal(load_distribution(path).probs, d.probs)
