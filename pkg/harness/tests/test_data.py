"""Dataset and vocabulary readers, including the files the builder CLI emits."""

import json

import pytest

from mlmharness.data import (
    DataError,
    MaskedInstance,
    encode_instance,
    gold_ids,
    load_vocab,
    read_dataset,
)


def write_vocab(path, tokens):
    path.write_text("\n".join(tokens) + "\n", encoding="utf-8")
    return path


GOOD_TOKENS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "a", "b", "##a", "##b"]


class TestLoadVocab:
    def test_file_order_defines_ids(self, tmp_path):
        vocab = load_vocab(write_vocab(tmp_path / "v.txt", GOOD_TOKENS))
        assert len(vocab) == len(GOOD_TOKENS)
        assert vocab.id_of("a") == 5
        assert vocab.pad_id == 0
        assert vocab.mask_id == 4

    def test_duplicate_entry_rejected(self, tmp_path):
        with pytest.raises(DataError, match="duplicate vocabulary entry 'a'"):
            load_vocab(write_vocab(tmp_path / "v.txt", GOOD_TOKENS + ["a"]))

    def test_missing_mask_token_rejected(self, tmp_path):
        tokens = [t for t in GOOD_TOKENS if t != "[MASK]"]
        with pytest.raises(DataError, match=r"missing the required token '\[MASK\]'"):
            load_vocab(write_vocab(tmp_path / "v.txt", tokens))

    def test_missing_pad_token_rejected(self, tmp_path):
        tokens = [t for t in GOOD_TOKENS if t != "[PAD]"]
        with pytest.raises(DataError, match=r"missing the required token '\[PAD\]'"):
            load_vocab(write_vocab(tmp_path / "v.txt", tokens))

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(DataError, match="does not exist"):
            load_vocab(tmp_path / "absent.txt")

    def test_empty_file_rejected(self, tmp_path):
        (tmp_path / "v.txt").write_text("\n", encoding="utf-8")
        with pytest.raises(DataError, match="empty"):
            load_vocab(tmp_path / "v.txt")


def make_record(**overrides):
    record = {
        "id": "d0-s1",
        "tokens": ["a", "[MASK]", "[MASK]", "b"],
        "mask_positions": [1, 2],
        "gold_tokens": ["a", "##b"],
    }
    record.update(overrides)
    return record


class TestInstanceValidation:
    def test_valid_record_parses(self):
        inst = MaskedInstance.from_record(make_record(), "here")
        assert inst.id == "d0-s1"
        assert inst.mask_positions == (1, 2)
        assert inst.gold_tokens == ("a", "##b")

    @pytest.mark.parametrize("missing", ["id", "tokens", "mask_positions", "gold_tokens"])
    def test_missing_field_rejected(self, missing):
        record = make_record()
        del record[missing]
        with pytest.raises(DataError, match=f"missing field '{missing}'"):
            MaskedInstance.from_record(record, "here")

    def test_position_gold_length_mismatch_rejected(self):
        with pytest.raises(DataError, match="2 mask positions but 1 gold"):
            MaskedInstance.from_record(make_record(gold_tokens=["a"]), "here")

    def test_no_positions_rejected(self):
        record = make_record(mask_positions=[], gold_tokens=[],
                             tokens=["a", "b"])
        with pytest.raises(DataError, match="no mask positions"):
            MaskedInstance.from_record(record, "here")

    def test_out_of_range_position_rejected(self):
        with pytest.raises(DataError, match="out of range"):
            MaskedInstance.from_record(make_record(mask_positions=[1, 9]), "here")

    def test_non_mask_token_at_position_rejected(self):
        record = make_record(tokens=["a", "[MASK]", "x", "b"])
        with pytest.raises(DataError, match="has 'x' at mask position 2"):
            MaskedInstance.from_record(record, "here")


class TestReadDataset:
    def test_reads_builder_training_file(self, fixture):
        instances = read_dataset(fixture.train64)
        assert len(instances) == 64
        ids = [inst.id for inst in instances]
        assert len(set(ids)) == 64
        for inst in instances:
            assert all(inst.tokens[p] == "[MASK]" for p in inst.mask_positions)

    def test_reads_builder_test_file(self, fixture):
        for inst in read_dataset(fixture.test64):
            assert len(inst.gold_tokens) == len(inst.mask_positions)

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text("{not json}\n", encoding="utf-8")
        with pytest.raises(DataError, match="bad.jsonl:1: invalid JSON"):
            read_dataset(path)

    def test_non_object_line_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text("[1, 2]\n", encoding="utf-8")
        with pytest.raises(DataError, match="expected a JSON object"):
            read_dataset(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(DataError, match="empty"):
            read_dataset(path)


class TestEncoding:
    def test_encode_round_trip(self, tmp_path):
        vocab = load_vocab(write_vocab(tmp_path / "v.txt", GOOD_TOKENS))
        inst = MaskedInstance.from_record(make_record(), "here")
        ids = encode_instance(inst, vocab, max_length=16)
        assert ids == [vocab.id_of(t) for t in inst.tokens]
        assert gold_ids(inst, vocab) == [5, 8]

    def test_unknown_token_is_vocabulary_mismatch(self, tmp_path):
        vocab = load_vocab(write_vocab(tmp_path / "v.txt", GOOD_TOKENS))
        record = make_record(tokens=["zz", "[MASK]", "[MASK]", "b"])
        inst = MaskedInstance.from_record(record, "here")
        with pytest.raises(DataError, match="vocabulary mismatch: token 'zz'"):
            encode_instance(inst, vocab, max_length=16)

    def test_unknown_gold_token_is_vocabulary_mismatch(self, tmp_path):
        vocab = load_vocab(write_vocab(tmp_path / "v.txt", GOOD_TOKENS))
        inst = MaskedInstance.from_record(make_record(gold_tokens=["a", "##zz"]), "here")
        with pytest.raises(DataError, match="vocabulary mismatch: token '##zz'"):
            gold_ids(inst, vocab)

    def test_over_long_instance_rejected(self, tmp_path):
        vocab = load_vocab(write_vocab(tmp_path / "v.txt", GOOD_TOKENS))
        inst = MaskedInstance.from_record(make_record(), "here")
        with pytest.raises(DataError, match="longer than the model maximum"):
            encode_instance(inst, vocab, max_length=3)
