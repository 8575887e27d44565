"""Lexical resources: inflection tables, derivational affixes, sense graph.

Three resource families back the word-level rewrites:

* inflection tables (TSV: lemma, inflected form, feature tags) for mapping a
  form back to its lemma;
* derivation tables (TSV: base, derived form, affix, prefix/suffix) for the
  affix-cycling rewrite, including a deterministic successor cycle over each
  affix inventory with optional explicit overrides;
* a sense graph for hyponym and antonym substitution, loadable either from
  the standard multi-file lexical database layout (``index.*`` / ``data.*``)
  or from a small one-relation-per-line TSV fixture.

All lookups are case-insensitive; callers restore casing on the way out.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

_POS_FILES = (("noun", "n"), ("verb", "v"), ("adj", "a"), ("adv", "r"))
HYPONYM_POINTER = "~"
ANTONYM_POINTER = "!"


class LexiconError(ValueError):
    """Raised for unreadable, empty or structurally broken lexicon files."""


# ---------------------------------------------------------------------------
# Inflections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InflectionLexicon:
    """Maps inflected surface forms to their candidate lemmas."""

    entries: dict[str, tuple[tuple[str, str], ...]]  # form -> ((lemma, features), ...)
    rows: int
    skipped: int

    def lookup(self, form: str) -> tuple[tuple[str, str], ...]:
        return self.entries.get(form.lower(), ())

    def lemma_for(self, form: str) -> str | None:
        """The lemma for a form; ambiguity resolves to the shortest lemma,
        breaking length ties lexicographically."""
        candidates = {lemma for lemma, _ in self.lookup(form)}
        if not candidates:
            return None
        return min(candidates, key=lambda lemma: (len(lemma), lemma))

    def __contains__(self, form: str) -> bool:
        return form.lower() in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def _read_tsv_rows(path: Path, min_fields: int) -> tuple[list[list[str]], int]:
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon file {path}: {exc}") from None
    rows: list[list[str]] = []
    malformed = 0
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) < min_fields or any(not f.strip() for f in fields[:min_fields]):
            malformed += 1
            log.warning("%s:%d: skipping malformed row", path, lineno)
            continue
        rows.append([f.strip() for f in fields])
    return rows, malformed


def load_morphynet_inflections(
    path: str | Path,
    columns: tuple[int, int, int] = (0, 1, 2),
) -> InflectionLexicon:
    """Load an inflection TSV.

    ``columns`` selects (lemma, inflected form, feature tags) so files with
    extra or reordered columns stay usable.  Rows where the form equals the
    lemma (case-insensitive) are identity mappings and are skipped; malformed
    rows are skipped with a warning.  A file with no usable rows is an error.
    """
    path = Path(path)
    need = max(columns) + 1
    rows, malformed = _read_tsv_rows(path, need)
    lemma_col, form_col, feat_col = columns
    entries: dict[str, list[tuple[str, str]]] = {}
    skipped = malformed
    kept = 0
    for fields in rows:
        lemma = fields[lemma_col].lower()
        form = fields[form_col].lower()
        feats = fields[feat_col]
        if form == lemma:
            skipped += 1
            continue
        pair = (lemma, feats)
        bucket = entries.setdefault(form, [])
        if pair not in bucket:
            bucket.append(pair)
        kept += 1
    if not entries:
        raise LexiconError(f"{path}: no usable inflection rows")
    frozen = {form: tuple(pairs) for form, pairs in entries.items()}
    return InflectionLexicon(entries=frozen, rows=kept, skipped=skipped)


# ---------------------------------------------------------------------------
# Derivations and affix cycles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffixLexicon:
    """Derived-form analyses plus a successor cycle per affix inventory."""

    derived: dict[str, tuple[str, str, str]]  # derived form -> (base, affix, kind)
    prefixes: tuple[str, ...]
    suffixes: tuple[str, ...]
    successor: dict[tuple[str, str], str]  # (kind, affix) -> replacement affix
    rows: int
    skipped: int

    def analysis(self, word: str) -> tuple[str, str, str] | None:
        return self.derived.get(word.lower())

    def next_affix(self, kind: str, affix: str) -> str | None:
        return self.successor.get((kind, affix))

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.derived

    def __len__(self) -> int:
        return len(self.derived)


def parse_cycle_override(path: str | Path) -> dict[str, str]:
    """Read explicit affix successors: one ``affix<TAB>successor`` per line."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LexiconError(f"cannot read cycle override file {path}: {exc}") from None
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
            raise LexiconError(f"{path}:{lineno}: expected 'affix<TAB>successor'")
        affix = fields[0].strip().lower()
        if affix in mapping:
            raise LexiconError(f"{path}:{lineno}: duplicate override for affix {affix!r}")
        mapping[affix] = fields[1].strip().lower()
    return mapping


def _complete_cycle(inventory: tuple[str, ...], overrides: dict[str, str]) -> dict[str, str]:
    """Extend explicit successor edges to cover the whole inventory.

    Overrides are honored verbatim.  Remaining affixes are paired with the
    remaining targets in sorted order, rotated by the smallest shift that
    avoids mapping an affix to itself (no such shift exists only for a
    singleton inventory).  With no overrides this reduces to the plain
    rotate-by-one cycle over the sorted inventory.
    """
    succ = {a: b for a, b in overrides.items() if a in inventory}
    sources = [a for a in inventory if a not in succ]
    taken = set(succ.values())
    targets = [a for a in inventory if a not in taken]
    if sources and targets:
        k = len(targets)
        shift = 0
        for s in range(k):
            if all(src != targets[(i + s) % k] for i, src in enumerate(sources)):
                shift = s
                break
        for i, src in enumerate(sources):
            succ[src] = targets[(i + shift) % k]
    return succ


def load_morphynet_derivations(
    path: str | Path,
    columns: tuple[int, int, int, int] = (0, 1, 2, 3),
    cycle_override: dict[str, str] | None = None,
) -> AffixLexicon:
    """Load a derivation TSV and build the affix successor cycles.

    ``columns`` selects (base, derived form, affix, kind).  Kind must read as
    ``prefix`` or ``suffix`` (case-insensitive).  For each derived form the
    first analysis in file order wins.  Each inventory's default cycle maps
    the i-th affix (sorted) to the (i+1)-th, wrapping at the end; entries of
    ``cycle_override`` replace individual edges and the rest of the cycle is
    completed deterministically around them.
    """
    path = Path(path)
    need = max(columns) + 1
    rows, malformed = _read_tsv_rows(path, need)
    base_col, derived_col, affix_col, kind_col = columns
    derived: dict[str, tuple[str, str, str]] = {}
    inventories: dict[str, set[str]] = {"prefix": set(), "suffix": set()}
    skipped = malformed
    kept = 0
    for fields in rows:
        kind = fields[kind_col].lower()
        if kind not in inventories:
            skipped += 1
            log.warning("%s: skipping row with unknown affix kind %r", path, fields[kind_col])
            continue
        base = fields[base_col].lower()
        form = fields[derived_col].lower()
        affix = fields[affix_col].lower()
        inventories[kind].add(affix)
        derived.setdefault(form, (base, affix, kind))
        kept += 1
    if not derived:
        raise LexiconError(f"{path}: no usable derivation rows")
    overrides = cycle_override or {}
    successor: dict[tuple[str, str], str] = {}
    for kind, affixes in inventories.items():
        inventory = tuple(sorted(affixes))
        for affix, nxt in _complete_cycle(inventory, overrides).items():
            successor[(kind, affix)] = nxt
    return AffixLexicon(
        derived=derived,
        prefixes=tuple(sorted(inventories["prefix"])),
        suffixes=tuple(sorted(inventories["suffix"])),
        successor=successor,
        rows=kept,
        skipped=skipped,
    )


# ---------------------------------------------------------------------------
# Sense graph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SenseGraph:
    """Word -> synsets (sense order), synset -> hyponyms/lemmas, word -> antonyms."""

    synsets_by_word: dict[str, tuple[str, ...]]
    lemmas: dict[str, tuple[str, ...]]
    hyponyms: dict[str, tuple[str, ...]]
    antonyms: dict[str, tuple[str, ...]]
    synset_count: int = field(default=0)

    def senses(self, word: str) -> tuple[str, ...]:
        return self.synsets_by_word.get(word.lower(), ())

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.synsets_by_word or word.lower() in self.antonyms


def _is_single_word(lemma: str) -> bool:
    return bool(lemma) and "_" not in lemma and " " not in lemma


def first_hyponym(graph: SenseGraph, word: str) -> str | None:
    """First single-word hyponym lemma, scanning senses in order.

    Order is: the word's synsets by sense rank, each synset's hyponym synsets
    in stored order, each hyponym synset's lemmas in stored order.  Multiword
    lemmas are skipped; ``None`` means no substitute exists.
    """
    for synset in graph.senses(word):
        for hyp in graph.hyponyms.get(synset, ()):
            for lemma in graph.lemmas.get(hyp, ()):
                if _is_single_word(lemma):
                    return lemma.lower()
    return None


def first_antonym(graph: SenseGraph, word: str) -> str | None:
    """First single-word antonym lemma in sense order, or ``None``."""
    for lemma in graph.antonyms.get(word.lower(), ()):
        if _is_single_word(lemma):
            return lemma.lower()
    return None


def load_wordnet(path: str | Path) -> SenseGraph:
    """Load the sense graph.

    A directory is parsed as the standard database layout (``index.noun`` /
    ``data.noun`` and friends); a file is parsed as the TSV fixture format
    with lines ``word<TAB>relation<TAB>target`` where relation is ``hyponym``
    or ``antonym``.
    """
    path = Path(path)
    if path.is_dir():
        return _load_wordnet_database(path)
    if path.is_file():
        return _load_sense_tsv(path)
    raise LexiconError(f"sense graph path does not exist: {path}")


def _load_sense_tsv(path: Path) -> SenseGraph:
    rows, malformed = _read_tsv_rows(path, 3)
    if malformed:
        raise LexiconError(f"{path}: {malformed} malformed fixture rows")
    synsets_by_word: dict[str, list[str]] = {}
    lemmas: dict[str, tuple[str, ...]] = {}
    hyponyms: dict[str, list[str]] = {}
    antonyms: dict[str, list[str]] = {}

    def synset_of(word: str) -> str:
        sid = f"fix-{word}"
        synsets_by_word.setdefault(word, [sid])
        lemmas.setdefault(sid, (word,))
        return sid

    for fields in rows:
        word, relation, target = fields[0].lower(), fields[1].lower(), fields[2].lower()
        if relation == "hyponym":
            hyponyms.setdefault(synset_of(word), []).append(synset_of(target))
        elif relation == "antonym":
            synset_of(word)
            antonyms.setdefault(word, []).append(target)
        else:
            raise LexiconError(f"{path}: unknown relation {relation!r} (expected hyponym or antonym)")
    if not synsets_by_word:
        raise LexiconError(f"{path}: no usable fixture rows")
    return SenseGraph(
        synsets_by_word={w: tuple(s) for w, s in synsets_by_word.items()},
        lemmas=lemmas,
        hyponyms={s: tuple(h) for s, h in hyponyms.items()},
        antonyms={w: tuple(a) for w, a in antonyms.items()},
        synset_count=len(lemmas),
    )


def _parse_data_line(line: str, pos_tag: str, path: Path, lineno: int):
    """One synset record: offset, member lemmas, typed pointers."""
    head = line.split(" | ", 1)[0]
    fields = head.split()
    try:
        offset = int(fields[0])
        w_cnt = int(fields[3], 16)
        words = []
        at = 4
        for _ in range(w_cnt):
            words.append(fields[at])
            at += 2  # skip lex_id
        p_cnt = int(fields[at])
        at += 1
        pointers = []
        for _ in range(p_cnt):
            symbol, target_offset, target_pos, source_target = fields[at:at + 4]
            at += 4
            pointers.append((symbol, int(target_offset), target_pos, source_target))
    except (IndexError, ValueError) as exc:
        raise LexiconError(f"{path}:{lineno}: malformed synset record: {exc}") from None
    return f"{pos_tag}{offset:08d}", words, pointers


_SATELLITE_TO_FILE = {"s": "a"}  # satellite adjectives live in the adjective files


def _load_wordnet_database(root: Path) -> SenseGraph:
    present = [(name, tag) for name, tag in _POS_FILES if (root / f"index.{name}").exists()]
    if not present:
        raise LexiconError(
            f"{root}: no index files found (expected index.noun/index.verb/index.adj/index.adv)"
        )
    for name, _ in present:
        if not (root / f"data.{name}").exists():
            raise LexiconError(f"{root}: index.{name} has no matching data.{name}")

    lemmas: dict[str, tuple[str, ...]] = {}
    hyponyms: dict[str, list[str]] = {}
    # (synset, source word number or 0) -> [(target synset, target word number)]
    antonym_edges: dict[str, list[tuple[int, str, int]]] = {}

    for name, tag in present:
        data_path = root / f"data.{name}"
        for lineno, line in enumerate(data_path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line or line.startswith("  "):  # license header lines
                continue
            synset, words, pointers = _parse_data_line(line, tag, data_path, lineno)
            lemmas[synset] = tuple(words)
            for symbol, t_offset, t_pos, source_target in pointers:
                t_tag = _SATELLITE_TO_FILE.get(t_pos, t_pos)
                target = f"{t_tag}{t_offset:08d}"
                if symbol == HYPONYM_POINTER:
                    hyponyms.setdefault(synset, []).append(target)
                elif symbol == ANTONYM_POINTER:
                    src_no = int(source_target[:2], 16)
                    dst_no = int(source_target[2:], 16)
                    antonym_edges.setdefault(synset, []).append((src_no, target, dst_no))

    synsets_by_word: dict[str, list[str]] = {}
    for name, tag in present:
        index_path = root / f"index.{name}"
        for lineno, line in enumerate(index_path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line or line.startswith("  "):
                continue
            fields = line.split()
            try:
                lemma = fields[0]
                synset_cnt = int(fields[2])
                p_cnt = int(fields[3])
                # lemma pos synset_cnt p_cnt [symbols] sense_cnt tagsense_cnt offsets...
                offsets = [int(x) for x in fields[4 + p_cnt + 2:]]
            except (IndexError, ValueError) as exc:
                raise LexiconError(f"{index_path}:{lineno}: malformed index record: {exc}") from None
            if len(offsets) != synset_cnt:
                raise LexiconError(
                    f"{index_path}:{lineno}: expected {synset_cnt} synset offsets, found {len(offsets)}"
                )
            ids = [f"{tag}{off:08d}" for off in offsets]
            synsets_by_word.setdefault(lemma.lower(), []).extend(ids)

    for synset, targets in list(hyponyms.items()):
        for target in targets:
            if target not in lemmas:
                raise LexiconError(f"dangling hyponym reference {synset} -> {target}")
    for synset, edges in antonym_edges.items():
        for _, target, _ in edges:
            if target not in lemmas:
                raise LexiconError(f"dangling antonym reference {synset} -> {target}")

    antonyms: dict[str, list[str]] = {}
    for word, synsets in synsets_by_word.items():
        found: list[str] = []
        for synset in synsets:
            members = [m.lower() for m in lemmas.get(synset, ())]
            for src_no, target, dst_no in antonym_edges.get(synset, ()):
                if src_no != 0 and (src_no > len(members) or members[src_no - 1] != word):
                    continue  # lexical pointer for a different member of this synset
                target_lemmas = lemmas.get(target, ())
                if dst_no == 0:
                    found.extend(target_lemmas)
                elif dst_no <= len(target_lemmas):
                    found.append(target_lemmas[dst_no - 1])
        if found:
            deduped = list(dict.fromkeys(x.lower() for x in found))
            antonyms[word] = deduped

    return SenseGraph(
        synsets_by_word={w: tuple(s) for w, s in synsets_by_word.items()},
        lemmas=lemmas,
        hyponyms={s: tuple(h) for s, h in hyponyms.items()},
        antonyms={w: tuple(a) for w, a in antonyms.items()},
        synset_count=len(lemmas),
    )
