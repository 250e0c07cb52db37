import numpy as np
import pytest

from scatternet.core.exceptions import (
    ScatternetConfigError,
    ScatternetDomainError,
    ScatternetNonFiniteError,
)
from scatternet.core.helpers import (
    parse_float_list,
    parse_param_pairs,
    parse_param_value,
    require_distribution,
    require_finite,
    require_odd,
    save_bytes_to_file,
    save_text_to_file,
    spawn_rng,
)


def test_require_finite_reports_first_bad_index():
    assert require_finite([1.0, 2.0], "x").tolist() == [1.0, 2.0]
    with pytest.raises(ScatternetNonFiniteError) as exc:
        require_finite([[1.0, 2.0], [np.inf, np.nan]], "x")
    assert exc.value.index == 2
    assert "Non-finite value at index 2" in str(exc.value)


@pytest.mark.parametrize("size", [1, 3, 9])
def test_require_odd_accepts_odd(size):
    assert require_odd(size) == size


@pytest.mark.parametrize("size", [0, 2, 4, -1])
def test_require_odd_rejects(size):
    with pytest.raises(ScatternetDomainError):
        require_odd(size)


def test_require_distribution():
    assert require_distribution([0.25, 0.75]).sum() == 1.0
    with pytest.raises(ScatternetDomainError):
        require_distribution([0.5, 0.6])
    with pytest.raises(ScatternetDomainError):
        require_distribution([-0.5, 1.5])
    with pytest.raises(ScatternetDomainError):
        require_distribution([])


def test_spawn_rng_streams():
    a = spawn_rng(42, 0).random(5)
    assert np.array_equal(a, spawn_rng(42, 0).random(5))
    assert not np.array_equal(a, spawn_rng(42, 1).random(5))
    assert not np.array_equal(a, spawn_rng(43, 0).random(5))


def test_parse_float_list():
    assert parse_float_list("1, 0.5,0.25") == [1.0, 0.5, 0.25]
    with pytest.raises(ScatternetConfigError):
        parse_float_list("1,abc")


@pytest.mark.parametrize(
    "text, expected",
    [("5", 5), ("0.02", 0.02), ("1,0.3,1", [1.0, 0.3, 1.0]), ("adam", "adam")],
)
def test_parse_param_value(text, expected):
    value = parse_param_value(text)
    assert value == expected
    assert type(value) is type(expected)


def test_parse_param_pairs():
    assert parse_param_pairs(["epochs=3", "lr = 0.1"]) == {"epochs": 3, "lr": 0.1}
    assert parse_param_pairs(None) == {}
    with pytest.raises(ScatternetConfigError):
        parse_param_pairs(["epochs"])
    with pytest.raises(ScatternetConfigError):
        parse_param_pairs(["=3"])


def test_save_to_file_creates_parents(tmp_path):
    path = tmp_path / "a" / "b" / "data.bin"
    assert save_bytes_to_file(b"\x00\x01", str(path)) == str(path)
    assert path.read_bytes() == b"\x00\x01"
    save_text_to_file("ok\n", str(tmp_path / "c" / "t.txt"))
    assert (tmp_path / "c" / "t.txt").read_text() == "ok\n"
