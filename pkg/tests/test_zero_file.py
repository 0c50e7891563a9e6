import io

import numpy as np
import pytest

from utils.errors import ZeroFileParseError, ZeroFileValidationError
from zeros.synthesis import synthesize_zeros
from zeros.zero_file import block_sizes, parse_zero_file, serialize_zero_set
from zeros.zero_set import Provenance, REAL_DATA, make_zero_set


def parse(text):
    return parse_zero_file(io.StringIO(text))


def test_parse_simple_file():
    zs = parse("modulus 4\nchi 3\n6.0209\n10.2437\n")
    assert zs.modulus == 4
    assert zs.conrey_indices == [3]
    assert zs.block(3).gammas.tolist() == [6.0209, 10.2437]
    assert zs.provenance.kind == REAL_DATA
    assert zs.is_complete
    assert zs.truncation_count == 2


def test_comments_and_blank_lines():
    zs = parse("# real data\n\nmodulus 5\nchi 2\n1.0\n\n# next\nchi 4\n2.0\n")
    assert block_sizes(zs) == {2: 1, 4: 1}
    assert not zs.is_complete


def test_decreasing_gammas_rejected():
    with pytest.raises(ZeroFileValidationError, match="gammas not increasing"):
        parse("modulus 4\nchi 3\n10.0\n6.0\n")


def test_non_unit_index_rejected():
    with pytest.raises(ZeroFileValidationError, match="conrey index not a unit"):
        parse("modulus 4\nchi 2\n6.0\n")


def test_principal_index_rejected():
    with pytest.raises(ZeroFileValidationError, match="principal"):
        parse("modulus 5\nchi 1\n6.0\n")


def test_malformed_line_reports_line_number():
    with pytest.raises(ZeroFileParseError) as info:
        parse("modulus 4\nchi 3\n6.0\nabc\n")
    assert info.value.line_number == 4
    assert "line 4" in str(info.value)


def test_missing_header():
    with pytest.raises(ZeroFileParseError) as info:
        parse("chi 3\n6.0\n")
    assert info.value.line_number == 1


def test_ordinate_before_block():
    with pytest.raises(ZeroFileParseError, match="before any"):
        parse("modulus 4\n6.0\n")


def test_empty_block_rejected():
    with pytest.raises(ZeroFileValidationError, match="empty block"):
        parse("modulus 5\nchi 2\nchi 3\n1.0\n")


def test_nonpositive_gamma_rejected():
    with pytest.raises(ZeroFileValidationError, match="positive"):
        parse("modulus 4\nchi 3\n0.0\n1.0\n")


def test_serialize_then_parse_is_exact(table5):
    zs = synthesize_zeros(5, table5, 20, seed=11)
    out = io.StringIO()
    serialize_zero_set(zs, out)
    text = out.getvalue()
    assert text.startswith("# provenance: synthetic seed=11")
    back = parse(text)
    assert back.conrey_indices == zs.conrey_indices
    for a, b in zip(back.blocks, zs.blocks):
        assert np.array_equal(a.gammas, b.gammas)


def test_weights_and_summary():
    zs = make_zero_set(4, [(3, [3 ** 0.5 / 2, 2.0])], Provenance())
    block = zs.block(3)
    assert block.weights[0] == pytest.approx(1.0)
    assert block.weight_sum == pytest.approx(1.0 + 1.0 / 4.25)
    summary = zs.summary()
    assert summary["blocks"] == 1 and summary["complete"] is True
    assert summary["max_height"] == 2.0
    assert zs.truncation_height == 2.0
