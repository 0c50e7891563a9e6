import pytest

from config.settings import settings
from utils.errors import DomainError, ZeroFileParseError
from zeros.zero_set import REAL_DATA


def test_builtin_mod_4(store):
    zs = store.load_builtin(4)
    assert zs.modulus == 4
    assert zs.provenance.kind == REAL_DATA
    assert zs.truncation_count == 10
    assert zs.block(3).gammas[0] == pytest.approx(6.0209489)
    assert store.load_builtin(4) is zs


def test_builtin_unknown_modulus(store):
    with pytest.raises(DomainError, match="no built-in"):
        store.load_builtin(7)


def test_get_zeros_resolution_order(store, tmp_path):
    assert store.get_zeros(4).provenance.kind == REAL_DATA
    assert store.get_zeros(4, synthetic_count=5).provenance.is_synthetic
    assert store.get_zeros(7).truncation_count == 5 * settings.DEFAULT_SYNTHETIC_COUNT

    path = store.save(store.synthesize(7, 4, seed=2), tmp_path / "q7.txt")
    loaded = store.get_zeros(7, zero_file=str(path))
    assert loaded.provenance.kind == REAL_DATA
    assert loaded.truncation_count == 5 * 4


def test_relative_names_resolve_in_data_dir(store, tmp_path):
    store.save(store.synthesize(5, 3, seed=1), tmp_path / "five.txt")
    zs = store.load_file("five.txt")
    assert zs.modulus == 5


def test_modulus_mismatch(store, tmp_path):
    path = store.save(store.synthesize(5, 3, seed=1), tmp_path / "five.txt")
    with pytest.raises(DomainError, match="modulus 5"):
        store.get_zeros(7, zero_file=str(path))


def test_bad_file_propagates(store, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("modulus 4\nchi 3\nnot-a-number\n")
    with pytest.raises(ZeroFileParseError):
        store.load_file(path)


def test_synthesize_is_memoised_and_clearable(store):
    a = store.synthesize(5, 3, seed=1)
    assert store.synthesize(5, 3, seed=1) is a
    store.clear()
    assert store.synthesize(5, 3, seed=1) is not a


def test_character_table_shared(store):
    assert store.character_table(9) is store.character_table(9)
