"""Ten synthetic linguistic-variation rewrites plus sentence application.

Nine operations rewrite individual words (sound-pair swaps, alphabet
rotation, two subword resegmentations, pig-latin restructuring, inflection
dropping, affix cycling, hyponym and antonym substitution); one rewrites
whole sentences with a small set of dialect-style grammar rules.  All are
deterministic given their inputs (the subword-dropout rewrite additionally
takes a seeded RNG), and all word-level rewrites map alphabetic words to
alphabetic words so word counts and word positions in a sentence never
change.
"""

from __future__ import annotations

import json
import re
import subprocess
from dataclasses import dataclass
from enum import Enum

from .corpus import Sentence, WordToken, tokenize_words
from .lexicons import AffixLexicon, InflectionLexicon, SenseGraph, first_antonym, first_hyponym
from .util import match_case, stable_rng
from .wordpiece import SubwordSeq, Vocab, tokenize_word, tokenize_word_dropout


class InterventionError(ValueError):
    """Raised for unknown kinds or missing resources for a kind."""


class PluginError(RuntimeError):
    """Raised when an external sentence-rewrite plugin misbehaves."""


class InterventionKind(str, Enum):
    """Canonical intervention names; ``NONE`` is the identity baseline."""

    NONE = "None"
    IPA = "IPA"
    SHIFT = "Shift"
    REG = "Reg"
    CHAR = "Char"
    PIG = "Pig"
    END = "End"
    MULTI = "Multi"
    AFFIX = "Affix"
    HYP = "Hyp"
    ANT = "Ant"


KIND_ORDER = tuple(InterventionKind)
WORD_KINDS = tuple(k for k in KIND_ORDER if k not in (InterventionKind.NONE, InterventionKind.MULTI))
TOKEN_KINDS = (InterventionKind.REG, InterventionKind.CHAR)

_ALIASES = {"-end": InterventionKind.END}


def parse_kind(name: str) -> InterventionKind:
    """Resolve a kind name case-insensitively, accepting the ``-End`` alias."""
    lowered = name.strip().lower()
    for kind in InterventionKind:
        if kind.value.lower() == lowered:
            return kind
    if lowered in _ALIASES:
        return _ALIASES[lowered]
    known = ", ".join(k.value for k in InterventionKind)
    raise InterventionError(f"unknown intervention kind {name!r}; expected one of: {known}")


@dataclass(frozen=True)
class WordResult:
    """Outcome of a word-level rewrite: surface output and a changed flag."""

    output: str
    changed: bool


def _unchanged(word: str) -> WordResult:
    return WordResult(word, False)


# ---------------------------------------------------------------------------
# Spelling-level rewrites
# ---------------------------------------------------------------------------

_VOICING_PAIRS = {"p": "b", "t": "d", "k": "g", "f": "v", "s": "z"}
IPA_MAP = {**_VOICING_PAIRS, **{v: k for k, v in _VOICING_PAIRS.items()}}


def ipa(word: str) -> WordResult:
    """Swap voiced and voiceless obstruent letters (p<->b, t<->d, k<->g,
    f<->v, s<->z), preserving case per letter.  Involutive."""
    out = []
    for ch in word:
        sub = IPA_MAP.get(ch.lower())
        if sub is None:
            out.append(ch)
        else:
            out.append(sub.upper() if ch.isupper() else sub)
    result = "".join(out)
    return WordResult(result, result != word)


def shift(word: str) -> WordResult:
    """Rotate each ASCII letter one step forward in the alphabet (z wraps
    to a), preserving case.  Twenty-six applications give back the input."""
    out = []
    for ch in word:
        if "a" <= ch <= "z":
            out.append(chr((ord(ch) - ord("a") + 1) % 26 + ord("a")))
        elif "A" <= ch <= "Z":
            out.append(chr((ord(ch) - ord("A") + 1) % 26 + ord("A")))
        else:
            out.append(ch)
    result = "".join(out)
    return WordResult(result, result != word)


_PIG_VOWELS = frozenset("aeiou")


def _pig_is_vowel(ch: str, position: int) -> bool:
    # "y" acts as a consonant word-initially and as a vowel elsewhere.
    return ch in _PIG_VOWELS or (ch == "y" and position > 0)


def _pig_word(word: str) -> str:
    low = word.lower()
    if _pig_is_vowel(low[0], 0):
        rebuilt = low + "yay"
    else:
        cut = 0
        while cut < len(low) and not _pig_is_vowel(low[cut], cut):
            cut += 1
        rebuilt = low[cut:] + low[:cut] + "ay"
    return match_case(rebuilt, word)


def pig(text: str) -> WordResult:
    """Pig-latin rewrite, applied to each alphabetic run in the input.

    Vowel-initial words take ``yay``; otherwise the whole initial consonant
    cluster moves to the end followed by ``ay``.  All-consonant words move
    everything ("my" -> "ymay"); "y" counts as a consonant only word-
    initially.  Output casing mirrors the input (all-caps or initial-cap),
    with letters otherwise lowercased.  Non-letter characters separate words
    and pass through untouched, so phrases work too.
    """
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isalpha():
            j = i + 1
            while j < n and text[j].isalpha():
                j += 1
            out.append(_pig_word(text[i:j]))
            i = j
        else:
            out.append(text[i])
            i += 1
    result = "".join(out)
    return WordResult(result, result != text)


# ---------------------------------------------------------------------------
# Subword-level rewrites
# ---------------------------------------------------------------------------

REG_DROPOUT_P = 0.5


def char_split(word: str, vocab: Vocab) -> SubwordSeq:
    """Split a word into single characters with continuation markers.

    Equivalent to subword dropout with p=1 when every character is in the
    vocabulary; characters missing from the vocabulary still appear (the
    sequence is not forced to the unknown token) so the rewrite stays a pure
    restructuring of the surface string.
    """
    if not word:
        raise ValueError("cannot split an empty word")
    pieces = [word[0]] + [vocab.marker + ch for ch in word[1:]]
    return SubwordSeq(tuple(pieces), word)


def reg_split(word: str, vocab: Vocab, seed: int, sentence_id: str, word_index: int,
              p: float = REG_DROPOUT_P) -> SubwordSeq:
    """Resegment a word with seeded subword dropout.

    The RNG is keyed by (seed, sentence id, word index, kind) so each word
    position draws independently and the result does not depend on
    processing order.
    """
    rng = stable_rng(seed, sentence_id, word_index, InterventionKind.REG.value)
    return tokenize_word_dropout(word, vocab, p, rng)


# ---------------------------------------------------------------------------
# Lexicon-backed rewrites
# ---------------------------------------------------------------------------

def drop_inflection(word: str, lexicon: InflectionLexicon) -> WordResult:
    """Replace an inflected form with its lemma (casing restored).

    Words absent from the table, and lemmas that are not purely alphabetic,
    leave the word unchanged.
    """
    lemma = lexicon.lemma_for(word)
    if lemma is None or not lemma.isalpha():
        return _unchanged(word)
    result = match_case(lemma, word)
    return WordResult(result, result != word)


def cycle_affix(word: str, lexicon: AffixLexicon) -> WordResult:
    """Swap a derived word's affix for the next one in its inventory cycle.

    The base is kept and the affix replaced (prefixes reattach in front,
    suffixes behind).  Unanalyzed words and replacements that would produce
    non-alphabetic output are left unchanged.
    """
    analysis = lexicon.analysis(word)
    if analysis is None:
        return _unchanged(word)
    base, affix, kind = analysis
    nxt = lexicon.next_affix(kind, affix)
    if nxt is None or nxt == affix:
        return _unchanged(word)
    rebuilt = nxt + base if kind == "prefix" else base + nxt
    if not rebuilt.isalpha():
        return _unchanged(word)
    result = match_case(rebuilt, word)
    return WordResult(result, result != word)


def hyponym_sub(word: str, graph: SenseGraph) -> WordResult:
    """Replace a word with its first single-word hyponym lemma, if any.

    Scans senses in rank order; multiword and non-alphabetic lemmas are
    skipped so word tokenization is preserved.
    """
    return _sense_sub(word, first_hyponym(graph, word))


def antonym_sub(word: str, graph: SenseGraph) -> WordResult:
    """Replace a word with its first single-word antonym lemma, if any."""
    return _sense_sub(word, first_antonym(graph, word))


def _sense_sub(word: str, lemma: str | None) -> WordResult:
    if lemma is None or not lemma.isalpha():
        return _unchanged(word)
    result = match_case(lemma, word)
    return WordResult(result, result != word)


# ---------------------------------------------------------------------------
# Sentence-level rewrite
# ---------------------------------------------------------------------------

_NEGATION = re.compile(r"\b\w*n't\b|\bnot\b", re.IGNORECASE)
_CLAUSE_BREAK = re.compile(r"([,;:.!?])")
_ANY_WORDS = re.compile(r"\b(anything|anyone|any)\b", re.IGNORECASE)
_ANY_MAP = {"any": "no", "anything": "nothing", "anyone": "nobody"}
_EXISTENTIAL = re.compile(r"^(\s*)(there)(\s+(?:is|are|was|were))\b", re.IGNORECASE)
_AINT = re.compile(r"\b(isn't|aren't|hasn't|haven't)\b", re.IGNORECASE)


def _negative_concord(text: str) -> str:
    parts = _CLAUSE_BREAK.split(text)
    out = []
    for part in parts:
        if part and part[0] in ",;:.!?":
            out.append(part)
            continue
        neg = _NEGATION.search(part)
        if neg:
            tail = _ANY_WORDS.sub(
                lambda m: match_case(_ANY_MAP[m.group().lower()], m.group()),
                part[neg.end():],
            )
            part = part[:neg.end()] + tail
        out.append(part)
    return "".join(out)


def multi_lite(text: str) -> WordResult:
    """Apply three dialect-style grammar rules to a sentence, in order.

    1. Negative concord: after a negation (``not`` or an ``n't`` form),
       ``any``/``anything``/``anyone`` become ``no``/``nothing``/``nobody``
       until the next clause punctuation.
    2. Existential *it*: sentence-initial ``There is/are/was/were`` becomes
       ``It is/are/was/were`` (casing mirrored).
    3. ``ain't``: ``isn't``/``aren't``/``hasn't``/``haven't`` become
       ``ain't``.

    Only the plain ASCII apostrophe is recognized in contractions.
    """
    result = _negative_concord(text)
    m = _EXISTENTIAL.match(result)
    if m:
        result = result[:m.start(2)] + match_case("it", m.group(2)) + result[m.end(2):]
    result = _AINT.sub(lambda m: match_case("ain't", m.group()), result)
    return WordResult(result, result != text)


# ---------------------------------------------------------------------------
# Sentence application
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransformedSentence:
    """A sentence after one intervention.

    Spelling-level kinds (and the sentence-level rewrite) produce ``text``;
    the two resegmentation kinds leave the surface string alone and produce
    ``token_groups``, one subword group per surface token.  ``changed_words``
    holds the ordinals (counting word tokens only) of words the intervention
    altered; the sentence-level rewrite reports no per-word ordinals, only
    the ``changed`` flag.
    """

    id: str
    kind: InterventionKind
    text: str | None
    token_groups: tuple[tuple[str, ...], ...] | None
    changed_words: tuple[int, ...]
    changed: bool

    def flat_tokens(self) -> list[str]:
        if self.token_groups is None:
            raise InterventionError(f"kind {self.kind.value} has no token output")
        return [tok for group in self.token_groups for tok in group]

    def to_record(self) -> dict:
        rec: dict = {"id": self.id, "kind": self.kind.value}
        if self.token_groups is not None:
            rec["tokens"] = self.flat_tokens()
        else:
            rec["text"] = self.text
        rec["changed_words"] = list(self.changed_words)
        rec["changed"] = self.changed
        return rec


@dataclass(frozen=True)
class LexiconSet:
    """The lexical resources the lexicon-backed rewrites draw on."""

    inflections: InflectionLexicon | None = None
    affixes: AffixLexicon | None = None
    senses: SenseGraph | None = None

    def require(self, kind: InterventionKind):
        need = {
            InterventionKind.END: ("inflections", self.inflections, "inflection table"),
            InterventionKind.AFFIX: ("affixes", self.affixes, "derivation table"),
            InterventionKind.HYP: ("senses", self.senses, "sense graph"),
            InterventionKind.ANT: ("senses", self.senses, "sense graph"),
        }
        if kind in need:
            _, value, label = need[kind]
            if value is None:
                raise InterventionError(f"kind {kind.value} requires a {label} but none was loaded")
            return value
        return None


def transform_word(
    kind: InterventionKind,
    word: str,
    lexicons: LexiconSet | None = None,
) -> WordResult:
    """Apply one word-level rewrite; resegmentation kinds are not accepted."""
    lex = lexicons or LexiconSet()
    if kind is InterventionKind.IPA:
        return ipa(word)
    if kind is InterventionKind.SHIFT:
        return shift(word)
    if kind is InterventionKind.PIG:
        return pig(word)
    if kind is InterventionKind.END:
        return drop_inflection(word, lex.require(kind))
    if kind is InterventionKind.AFFIX:
        return cycle_affix(word, lex.require(kind))
    if kind is InterventionKind.HYP:
        return hyponym_sub(word, lex.require(kind))
    if kind is InterventionKind.ANT:
        return antonym_sub(word, lex.require(kind))
    if kind is InterventionKind.NONE:
        return _unchanged(word)
    raise InterventionError(f"kind {kind.value} does not rewrite single words")


def apply_to_sentence(
    kind: InterventionKind,
    sentence: Sentence,
    lexicons: LexiconSet | None = None,
    vocab: Vocab | None = None,
    seed: int = 0,
    dropout_p: float = REG_DROPOUT_P,
) -> TransformedSentence:
    """Apply one intervention to a sentence.

    Word-level kinds rewrite each word token in place and splice the results
    back between the untouched punctuation and whitespace.  The two
    resegmentation kinds emit subword groups for every surface token
    (non-words are segmented without dropout).  The sentence-level rewrite
    and the identity baseline return the rewritten/original text.
    """
    lex = lexicons or LexiconSet()
    if kind in TOKEN_KINDS:
        if vocab is None:
            raise InterventionError(f"kind {kind.value} requires a subword vocabulary")
        return _apply_token_kind(kind, sentence, vocab, seed, dropout_p)
    if kind is InterventionKind.MULTI:
        res = multi_lite(sentence.text)
        return TransformedSentence(
            id=sentence.id, kind=kind, text=res.output, token_groups=None,
            changed_words=(), changed=res.changed,
        )
    if kind is InterventionKind.NONE:
        return TransformedSentence(
            id=sentence.id, kind=kind, text=sentence.text, token_groups=None,
            changed_words=(), changed=False,
        )
    return _apply_word_kind(kind, sentence, lex)


def _apply_word_kind(kind: InterventionKind, sentence: Sentence, lex: LexiconSet) -> TransformedSentence:
    text = sentence.text
    pieces: list[str] = []
    cursor = 0
    ordinal = -1
    changed: list[int] = []
    for tok in tokenize_words(text):
        pieces.append(text[cursor:tok.start])
        if tok.is_word:
            ordinal += 1
            res = transform_word(kind, tok.surface, lex)
            pieces.append(res.output)
            if res.changed:
                changed.append(ordinal)
        else:
            pieces.append(tok.surface)
        cursor = tok.end
    pieces.append(text[cursor:])
    return TransformedSentence(
        id=sentence.id, kind=kind, text="".join(pieces), token_groups=None,
        changed_words=tuple(changed), changed=bool(changed),
    )


def _apply_token_kind(
    kind: InterventionKind,
    sentence: Sentence,
    vocab: Vocab,
    seed: int,
    dropout_p: float,
) -> TransformedSentence:
    groups: list[tuple[str, ...]] = []
    changed: list[int] = []
    ordinal = -1
    for tok in tokenize_words(sentence.text):
        if tok.is_word:
            ordinal += 1
            if kind is InterventionKind.CHAR:
                seq = char_split(tok.surface, vocab)
            else:
                seq = reg_split(tok.surface, vocab, seed, sentence.id, ordinal, dropout_p)
            if seq.pieces != tokenize_word(tok.surface, vocab).pieces:
                changed.append(ordinal)
            groups.append(seq.pieces)
        else:
            groups.append(tokenize_word(tok.surface, vocab).pieces)
    return TransformedSentence(
        id=sentence.id, kind=kind, text=None, token_groups=tuple(groups),
        changed_words=tuple(changed), changed=bool(changed),
    )


# ---------------------------------------------------------------------------
# External sentence-rewrite plugin
# ---------------------------------------------------------------------------

def run_sentence_plugin(
    command: list[str],
    sentences: list[Sentence],
    timeout: float = 120.0,
) -> dict[str, WordResult]:
    """Run an external sentence rewriter over stdin/stdout JSONL.

    The subprocess receives one ``{"id", "text"}`` object per line and must
    emit one ``{"id", "text", "changed"}`` object per input line (any
    order).  Nonzero exit, timeouts, unparsable output, or an id set that
    differs from the input are all reported as :class:`PluginError`.
    """
    if not command:
        raise PluginError("empty plugin command")
    payload = "".join(
        json.dumps({"id": s.id, "text": s.text}, ensure_ascii=False) + "\n" for s in sentences
    )
    try:
        proc = subprocess.run(
            command, input=payload, capture_output=True, text=True, timeout=timeout,
        )
    except FileNotFoundError:
        raise PluginError(f"plugin command not found: {command[0]}") from None
    except subprocess.TimeoutExpired:
        raise PluginError(f"plugin timed out after {timeout:.0f}s: {' '.join(command)}") from None
    if proc.returncode != 0:
        tail = proc.stderr.strip().splitlines()[-1] if proc.stderr.strip() else "(no stderr)"
        raise PluginError(f"plugin exited with status {proc.returncode}: {tail}")
    results: dict[str, WordResult] = {}
    for lineno, line in enumerate(proc.stdout.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            rid, text, was_changed = str(rec["id"]), str(rec["text"]), bool(rec["changed"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise PluginError(f"plugin output line {lineno} is not a valid record: {exc}") from None
        if rid in results:
            raise PluginError(f"plugin emitted duplicate id {rid!r}")
        results[rid] = WordResult(text, was_changed)
    expected = {s.id for s in sentences}
    if set(results) != expected:
        missing = sorted(expected - set(results))[:3]
        extra = sorted(set(results) - expected)[:3]
        raise PluginError(f"plugin id mismatch (missing {missing}, unexpected {extra})")
    return results
