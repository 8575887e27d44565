import math
import random

import pytest

from lingvar.corpus import (
    CorpusError,
    DataSplit,
    Sentence,
    SPLIT_SIZES,
    assign_pools,
    compute_stats,
    count_words,
    read_documents,
    sample_split,
    split_sentences,
    tokenize_words,
)


class TestTokenizeWords:
    def test_words_and_punct(self):
        toks = tokenize_words("He wore nice boots, right?")
        assert [t.surface for t in toks] == ["He", "wore", "nice", "boots", ",", "right", "?"]
        assert [t.is_word for t in toks] == [True, True, True, True, False, True, False]

    def test_spans_cover_surfaces(self):
        text = "Dr. Smith's cat (yes!) is 3 years old."
        for tok in tokenize_words(text):
            assert text[tok.start:tok.end] == tok.surface

    def test_apostrophe_splits(self):
        assert [t.surface for t in tokenize_words("don't")] == ["don", "'", "t"]

    def test_punct_chars_individual(self):
        assert [t.surface for t in tokenize_words("a--b...")] == ["a", "-", "-", "b", ".", ".", "."]

    def test_digits_are_tokens_but_not_words(self):
        toks = tokenize_words("room 42 and 3rd floor")
        assert [t.surface for t in toks] == ["room", "42", "and", "3rd", "floor"]
        assert [t.is_word for t in toks] == [True, False, True, False, True]

    def test_count_words(self):
        assert count_words("He wore boots.") == 3
        assert count_words("42!") == 0


class TestSplitSentences:
    def texts(self, raw):
        return [s.text for s in split_sentences(raw)]

    def test_basic_boundaries(self):
        assert self.texts("The dog barked. The cat left. Was it fun?") == [
            "The dog barked.",
            "The cat left.",
            "Was it fun?",
        ]

    def test_abbreviations_do_not_split(self):
        assert self.texts("Dr. Smith arrived. He sat down.") == [
            "Dr. Smith arrived.",
            "He sat down.",
        ]
        assert self.texts("They sell apples, pears, etc. every day.") == [
            "They sell apples, pears, etc. every day."
        ]

    def test_initials_do_not_split(self):
        assert self.texts("J. K. Rowling wrote it. Fans rejoiced.") == [
            "J. K. Rowling wrote it.",
            "Fans rejoiced.",
        ]
        assert self.texts("The U.S. team won. Crowds cheered.") == [
            "The U.S. team won.",
            "Crowds cheered.",
        ]

    def test_decimal_numbers_do_not_split(self):
        assert self.texts("It costs 3.14 dollars. That seems fair.") == [
            "It costs 3.14 dollars.",
            "That seems fair.",
        ]

    def test_terminator_runs_and_closers(self):
        assert self.texts('He yelled "Stop!" Then he ran. What now?! Really now.') == [
            'He yelled "Stop!"',
            "Then he ran.",
            "What now?!",
            "Really now.",
        ]

    def test_lowercase_continuation_not_split(self):
        assert self.texts("The inc. was sued. vs. what exactly?") == [
            "The inc. was sued. vs. what exactly?"
        ]

    def test_short_sentences_dropped(self):
        assert self.texts("Go. The dog barked. No.") == ["The dog barked."]

    def test_paragraphs_split_separately(self):
        got = self.texts("One two three\n\nFour five six.")
        assert got == ["One two three", "Four five six."]

    def test_whitespace_normalized_in_text(self):
        got = self.texts("The  dog\n barked. ")
        assert got == ["The dog barked."]

    def test_ids_stable_and_unique(self):
        a = split_sentences("The dog barked. The dog barked.", doc_ordinal=3)
        b = split_sentences("The dog barked. The dog barked.", doc_ordinal=3)
        assert [s.id for s in a] == [s.id for s in b]
        assert len({s.id for s in a}) == 2
        assert all(s.id.startswith("0003-") for s in a)

    def test_doc_ordinal_distinguishes_ids(self):
        a = split_sentences("The dog barked.", doc_ordinal=0)[0]
        b = split_sentences("The dog barked.", doc_ordinal=1)[0]
        assert a.id != b.id

    def test_source_recorded(self):
        s = split_sentences("The dog barked.", source="test-pool")[0]
        assert s.source == "test-pool"


class TestReadDocuments:
    def test_directory_of_txt(self, tmp_path):
        (tmp_path / "b.txt").write_text("second doc", encoding="utf-8")
        (tmp_path / "a.txt").write_text("first doc", encoding="utf-8")
        (tmp_path / "ignored.csv").write_text("x", encoding="utf-8")
        assert read_documents(tmp_path) == ["first doc", "second doc"]

    def test_jsonl(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        path.write_text('{"text": "one"}\n{"text": "two"}\n', encoding="utf-8")
        assert read_documents(path) == ["one", "two"]

    def test_jsonl_missing_text_field(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        path.write_text('{"body": "one"}\n', encoding="utf-8")
        with pytest.raises(CorpusError, match="missing 'text'"):
            read_documents(path)

    def test_txt_blocks(self, tmp_path):
        path = tmp_path / "docs.txt"
        path.write_text("doc one here\n\ndoc two here\n", encoding="utf-8")
        assert read_documents(path) == ["doc one here", "doc two here\n"]

    def test_missing_path(self, tmp_path):
        with pytest.raises(CorpusError, match="does not exist"):
            read_documents(tmp_path / "nope.txt")


class TestAssignPools:
    def test_halves_partition(self):
        train, test = assign_pools(10, seed=0)
        assert len(train) == 5 and len(test) == 5
        assert sorted(train + test) == list(range(10))

    def test_odd_count_favors_train(self):
        train, test = assign_pools(7, seed=1)
        assert len(train) == 4 and len(test) == 3

    def test_deterministic_and_seed_sensitive(self):
        assert assign_pools(20, seed=5) == assign_pools(20, seed=5)
        assert assign_pools(20, seed=5) != assign_pools(20, seed=6)

    def test_too_few_docs(self):
        with pytest.raises(CorpusError, match="at least 2"):
            assign_pools(1, seed=0)


def make_pool(n, prefix="s"):
    return [Sentence(id=f"{prefix}{i:05d}", text=f"sentence number {i} ok.", source="train-pool")
            for i in range(n)]


class TestSampleSplit:
    def test_sizes_fixed(self):
        assert SPLIT_SIZES == {"S": 264, "M": 2641, "L": 26415}

    def test_s_split_exact_size(self):
        pool = make_pool(500)
        split = sample_split(pool, "S", seed=3)
        assert split.name == "S" and split.seed == 3
        assert len(split.ids) == 264
        assert list(split.ids) == sorted(split.ids)
        assert set(split.ids) <= {s.id for s in pool}

    def test_undersized_pool_is_error(self):
        with pytest.raises(CorpusError, match="requires 2641"):
            sample_split(make_pool(500), "M", seed=0)
        with pytest.raises(CorpusError, match="requires 26415"):
            sample_split(make_pool(500), "L", seed=0)

    def test_unknown_size_name(self):
        with pytest.raises(CorpusError, match="unknown split size"):
            sample_split(make_pool(300), "XL", seed=0)

    def test_permutation_invariance(self):
        pool = make_pool(400)
        shuffled = list(pool)
        random.Random(9).shuffle(shuffled)
        assert sample_split(pool, "S", seed=11).ids == sample_split(shuffled, "S", seed=11).ids

    def test_seed_changes_selection(self):
        pool = make_pool(400)
        assert sample_split(pool, "S", seed=1).ids != sample_split(pool, "S", seed=2).ids

    def test_duplicate_ids_rejected(self):
        pool = make_pool(300) + [make_pool(1)[0]]
        with pytest.raises(CorpusError, match="duplicate"):
            sample_split(pool, "S", seed=0)

    def test_record_roundtrip(self):
        split = sample_split(make_pool(300), "S", seed=4)
        assert DataSplit.from_record(split.to_record()) == split


def percentile_oracle(values, pct):
    """Smallest value with at least pct% of the data at or below it."""
    ordered = sorted(values)
    n = len(ordered)
    for v in ordered:
        if sum(1 for x in ordered if x <= v) >= math.ceil(pct / 100 * n):
            return v
    return ordered[-1]


class TestComputeStats:
    def pool_with_counts(self, counts):
        sentences = []
        for i, c in enumerate(counts):
            text = " ".join(["word"] * c) + "."
            sentences.append(Sentence(id=f"x{i:03d}", text=text, source="train-pool"))
        by_id = {s.id: s for s in sentences}
        split = DataSplit(name="S", seed=0, ids=tuple(sorted(by_id)))
        return split, by_id

    def test_hand_computed(self):
        split, by_id = self.pool_with_counts([2, 4, 4, 6, 10])
        stats = compute_stats(split, by_id)
        assert stats.sentences == 5
        assert stats.words == 26
        assert stats.mean_words == 5.2
        assert stats.min_words == 2 and stats.max_words == 10
        assert stats.percentiles["p50"] == 4
        assert stats.percentiles["p90"] == 10
        assert stats.percentiles["p25"] == 4

    def test_percentile_matches_oracle_fuzz(self):
        rng = random.Random(2024)
        for _ in range(30):
            counts = [rng.randint(2, 40) for _ in range(rng.randint(1, 60))]
            split, by_id = self.pool_with_counts(counts)
            stats = compute_stats(split, by_id)
            realized = [count_words(by_id[sid].text) for sid in split.ids]
            for pct in (25, 50, 75, 90, 99):
                assert stats.percentiles[f"p{pct}"] == percentile_oracle(realized, pct)

    def test_unknown_id_is_error(self):
        split = DataSplit(name="S", seed=0, ids=("ghost",))
        with pytest.raises(CorpusError, match="unknown sentence id"):
            compute_stats(split, {})
