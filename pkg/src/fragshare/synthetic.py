"""Deterministic synthetic clinical-flavored corpora with planted identifiers.

Stands in for access-restricted clinical sources so the pipeline and audits
can run end to end.  Sentences are generated from typed NP/VP templates, so
every document carries a valid constituency tree by construction.
Identifier terms (names, locations, occupations, drugs) are planted at
configurable per-category word rates and tracked exactly.

Placement is deliberate: planted person names form two-word subject NPs
(extractable, but usually rare enough for the document-frequency filter to
drop), while locations, occupations, and drugs sit as one-word NPs inside
sentence-level PPs, outside any extractable NP/VP span.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping

from .errors import ValidationError
from .model import Corpus, Document, Sentence, Token, TreeNode

# ---------------------------------------------------------------------------
# vocabulary (general vocabulary is disjoint from every identifier pool)

SUBJECT_NOUNS = ("patient", "exam", "workup", "course", "review", "report")
SHARED_NOUNS = (
    "pain", "nausea", "fever", "cough", "fatigue",
    "swelling", "dizziness", "weakness", "tremor", "congestion",
)
CASE_NOUNS = ("hypertension", "angina", "palpitations", "infarction", "ischemia", "tachycardia")
CONTROL_NOUNS = ("allergy", "migraine", "sprain", "insomnia", "dermatitis", "sinusitis")
BODY_NOUNS = ("chest", "abdomen", "knee", "shoulder")
THING_NOUNS = ("scan", "xray", "dose", "panel", "culture", "biopsy")
ADJECTIVES = (
    "severe", "mild", "acute", "chronic", "stable",
    "persistent", "intermittent", "diffuse", "recurrent", "transient",
)
VERBS_VBZ = ("denies", "reports", "shows", "reveals", "confirms", "suggests")
VERBS_VBD = ("developed", "experienced", "received", "tolerated", "continued", "noted")
VERBS_VBN = ("admitted", "given", "started", "observed", "monitored", "discharged")
VERBS_VB = ("improve", "persist", "resolve", "recur", "worsen", "continue")
VERBS_INTRANS = ("persisted", "resolved", "improved", "worsened", "recurred", "settled")
MODALS = ("may", "will", "could", "should")
ADVERBS = ("mostly", "slightly", "gradually", "briefly")
LINK_VERBS = ("was", "remained")
PRED_ADJS = ("stable", "afebrile", "alert", "comfortable", "oriented", "confused")

FIRST_NAMES = (
    "alice", "marcus", "nora", "victor", "elena", "samuel", "priya", "omar",
    "lucia", "felix", "ingrid", "tobias", "maeve", "ruben", "dalia",
)
LAST_NAMES = (
    "winslow", "calder", "okafor", "braddock", "fontaine", "kowalski",
    "merritt", "abernathy", "delgado", "hargrove", "lindqvist", "pemberton",
    "quintero", "rutherford", "stavros",
)
# recurring names survive document-frequency filtering, like real common names
COMMON_NAMES = (("john", "smith"), ("mary", "jones"), ("james", "miller"))
LOCATIONS = (
    "boston", "denver", "springfield", "riverdale", "oakmont",
    "fairview", "lakewood", "ashford", "milton", "granby",
)
OCCUPATIONS = (
    "teacher", "carpenter", "plumber", "florist", "barber",
    "tailor", "machinist", "librarian", "surveyor", "locksmith",
)
DRUGS = (
    "warfarin", "heparin", "metoprolol", "lisinopril", "amiodarone",
    "digoxin", "furosemide", "atorvastatin", "clopidogrel", "enalapril",
)

LOCATION_PREPS = ("in", "from", "to", "near")
DRUG_PREPS = ("on", "with")

PLANT_CATEGORIES = ("name", "location", "occupation", "drug")
_PLANT_COST = {"name": 2, "location": 1, "occupation": 1, "drug": 1}

DEFAULT_PLANT_RATES: Mapping[str, float] = {
    "name": 0.008,
    "location": 0.006,
    "occupation": 0.001,
    "drug": 0.002,
}


def plant_term_pools() -> dict[str, frozenset[str]]:
    """Every term the generator may plant, by category (for audits/tests)."""
    names = set(FIRST_NAMES) | set(LAST_NAMES)
    for first, last in COMMON_NAMES:
        names.update((first, last, f"{first} {last}"))
    return {
        "name": frozenset(names),
        "location": frozenset(LOCATIONS),
        "occupation": frozenset(OCCUPATIONS),
        "drug": frozenset(DRUGS),
    }


def general_vocabulary() -> frozenset[str]:
    """All non-identifier words the generator can emit."""
    pools = (
        SUBJECT_NOUNS, SHARED_NOUNS, CASE_NOUNS, CONTROL_NOUNS, BODY_NOUNS,
        THING_NOUNS, ADJECTIVES, VERBS_VBZ, VERBS_VBD, VERBS_VBN, VERBS_VB,
        VERBS_INTRANS, MODALS, ADVERBS, LINK_VERBS, PRED_ADJS,
        ("the", "a") + LOCATION_PREPS + DRUG_PREPS + ("of", "as"),
    )
    return frozenset(itertools.chain.from_iterable(pools))


@dataclass(frozen=True)
class SynthSpec:
    """Parameters for one synthetic corpus."""

    n_docs: int
    seed: int
    case_fraction: float = 0.10
    sentences_per_doc: tuple[int, int] = (8, 14)
    plant_rates: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_PLANT_RATES))
    profile: str = "clinical"

    def __post_init__(self):
        if self.n_docs < 1:
            raise ValidationError("n_docs must be >= 1")
        if not 0.0 <= self.case_fraction <= 1.0:
            raise ValidationError("case_fraction must be in [0, 1]")
        lo, hi = self.sentences_per_doc
        if not 1 <= lo <= hi:
            raise ValidationError("sentences_per_doc must satisfy 1 <= lo <= hi")
        for cat, rate in self.plant_rates.items():
            if cat not in PLANT_CATEGORIES:
                raise ValidationError(f"unknown plant category {cat!r}")
            if rate < 0:
                raise ValidationError(f"plant rate for {cat!r} must be >= 0")
            if rate > 1:
                raise ValidationError(f"plant rate for {cat!r} exceeds 1")
        if self.profile != "clinical":
            raise ValidationError(f"unknown vocab profile {self.profile!r}")


class _SentenceBuilder:
    """Accumulates tokens while subtree builders hand out leaf nodes."""

    def __init__(self):
        self.tokens: list[Token] = []

    def leaf(self, pos: str, form: str) -> TreeNode:
        self.tokens.append(Token(form=form, pos=pos))
        return TreeNode(pos, leaf=len(self.tokens) - 1)


def _node(label: str, *children: TreeNode) -> TreeNode:
    return TreeNode(label, tuple(children))


def _object_noun(rng: random.Random, label: str | None) -> str:
    flavored = CASE_NOUNS if label == "case" else CONTROL_NOUNS
    pool = SHARED_NOUNS + flavored + flavored  # bias toward the label's flavor
    return rng.choice(pool)


def _np_subject(s: _SentenceBuilder, rng: random.Random) -> TreeNode:
    noun = rng.choice(SUBJECT_NOUNS)
    if rng.random() < 0.25:
        return _node("NP", s.leaf("DT", "the"), s.leaf("JJ", rng.choice(ADJECTIVES)), s.leaf("NN", noun))
    return _node("NP", s.leaf("DT", "the"), s.leaf("NN", noun))


def _np_object(s: _SentenceBuilder, rng: random.Random, label: str | None, size: int) -> TreeNode:
    noun = _object_noun(rng, label)
    if size <= 1:
        return _node("NP", s.leaf("NN", noun))
    if size == 2:
        shape = rng.randrange(3)
        if shape == 0:
            return _node("NP", s.leaf("JJ", rng.choice(ADJECTIVES)), s.leaf("NN", noun))
        if shape == 1:
            return _node("NP", s.leaf("DT", "the"), s.leaf("NN", noun))
        return _node("NP", s.leaf("NN", rng.choice(BODY_NOUNS)), s.leaf("NN", noun))
    if size == 3:
        if rng.random() < 0.5:
            return _node(
                "NP",
                s.leaf("DT", "the"), s.leaf("JJ", rng.choice(ADJECTIVES)), s.leaf("NN", noun),
            )
        return _node(
            "NP",
            s.leaf("JJ", rng.choice(ADJECTIVES)), s.leaf("NN", rng.choice(BODY_NOUNS)), s.leaf("NN", noun),
        )
    adj1, adj2 = rng.sample(ADJECTIVES, 2)
    return _node("NP", s.leaf("DT", "the"), s.leaf("JJ", adj1), s.leaf("JJ", adj2), s.leaf("NN", noun))


def _np_of_np(s: _SentenceBuilder, rng: random.Random) -> TreeNode:
    # five-word NP whose inner NPs are extractable, the outer one is not
    inner1 = _node("NP", s.leaf("DT", "the"), s.leaf("NN", rng.choice(THING_NOUNS)))
    pp = _node("PP", s.leaf("IN", "of"), _node("NP", s.leaf("DT", "the"), s.leaf("NN", rng.choice(BODY_NOUNS))))
    return _node("NP", inner1, pp)


def _object_size(rng: random.Random) -> int:
    return rng.choices((1, 2, 3, 4), weights=(20, 40, 30, 10))[0]


def _vp(s: _SentenceBuilder, rng: random.Random, label: str | None) -> TreeNode:
    family = rng.choices(
        ("vbz_obj", "vbd_obj", "intrans", "passive", "modal", "copula"),
        weights=(24, 18, 12, 20, 16, 10),
    )[0]
    if family == "vbz_obj":
        return _node("VP", s.leaf("VBZ", rng.choice(VERBS_VBZ)), _np_object(s, rng, label, _object_size(rng)))
    if family == "vbd_obj":
        return _node("VP", s.leaf("VBD", rng.choice(VERBS_VBD)), _np_object(s, rng, label, _object_size(rng)))
    if family == "intrans":
        verb = s.leaf("VBD", rng.choice(VERBS_INTRANS))
        if rng.random() < 0.5:
            return _node("VP", verb, _node("ADVP", s.leaf("RB", rng.choice(ADVERBS))))
        return _node("VP", verb)
    if family == "passive":
        aux = s.leaf("VBD", "was")
        if rng.random() < 0.6:
            inner = _node("VP", s.leaf("VBN", rng.choice(VERBS_VBN)), _np_object(s, rng, label, rng.choice((1, 2))))
        else:
            inner = _node("VP", s.leaf("VBN", rng.choice(VERBS_VBN)))
        return _node("VP", aux, inner)
    if family == "modal":
        modal = s.leaf("MD", rng.choice(MODALS))
        if rng.random() < 0.5:
            inner = _node("VP", s.leaf("VB", rng.choice(VERBS_VB)), _np_object(s, rng, label, rng.choice((1, 2))))
        else:
            inner = _node("VP", s.leaf("VB", rng.choice(VERBS_VB)))
        return _node("VP", modal, inner)
    return _node(
        "VP",
        s.leaf("VBD", rng.choice(LINK_VERBS)),
        _node("ADJP", s.leaf("JJ", rng.choice(PRED_ADJS))),
    )


def _plant_pp(s: _SentenceBuilder, rng: random.Random, category: str) -> TreeNode:
    # one-word identifier NP under a sentence-level PP: outside NP/VP extraction
    if category == "location":
        prep, word, pos = rng.choice(LOCATION_PREPS), rng.choice(LOCATIONS), "NNP"
    elif category == "occupation":
        prep, word, pos = "as", rng.choice(OCCUPATIONS), "NN"
    else:  # drug
        prep, word, pos = rng.choice(DRUG_PREPS), rng.choice(DRUGS), "NN"
    return _node("PP", s.leaf("IN", prep), _node("NP", s.leaf(pos, word)))


def _build_sentence(
    rng: random.Random,
    label: str | None,
    plant: str | None,
    name_source: "itertools.cycle[tuple[str, str]]",
) -> Sentence:
    s = _SentenceBuilder()
    children: list[TreeNode] = []
    if plant == "name":
        if rng.random() < 0.25:
            first, last = COMMON_NAMES[rng.randrange(len(COMMON_NAMES))]
        else:
            first, last = next(name_source)
        children.append(_node("NP", s.leaf("NNP", first), s.leaf("NNP", last)))
        children.append(_vp(s, rng, label))
    else:
        if plant is None and rng.random() < 0.12:
            children.append(_np_of_np(s, rng))
        else:
            children.append(_np_subject(s, rng))
        children.append(_vp(s, rng, label))
        if plant is not None:
            children.append(_plant_pp(s, rng, plant))
    root = _node("S", *children)
    return Sentence(tokens=tuple(s.tokens), tree=root)


def _due_category(rates: Mapping[str, float], planted: dict[str, int], total_words: int) -> str | None:
    best = None
    best_deficit = 0.0
    for cat in PLANT_CATEGORIES:
        rate = rates.get(cat, 0.0)
        if rate <= 0:
            continue
        deficit = rate * total_words - planted[cat]
        if deficit >= _PLANT_COST[cat] / 2 and deficit > best_deficit:
            best, best_deficit = cat, deficit
    return best


def generate_synthetic(spec: SynthSpec) -> Corpus:
    """Generate a labeled, treed corpus; byte-identical for a fixed spec."""
    rng = random.Random(spec.seed)

    n_case = round(spec.case_fraction * spec.n_docs)
    labels = ["case"] * n_case + ["control"] * (spec.n_docs - n_case)
    rng.shuffle(labels)

    unique_names = [
        (first, last)
        for first in FIRST_NAMES
        for last in LAST_NAMES
    ]
    rng.shuffle(unique_names)
    name_source = itertools.cycle(unique_names)

    planted = {cat: 0 for cat in PLANT_CATEGORIES}
    total_words = 0
    documents = []
    lo, hi = spec.sentences_per_doc
    for i in range(spec.n_docs):
        label = labels[i]
        sentences = []
        for _ in range(rng.randint(lo, hi)):
            plant = _due_category(spec.plant_rates, planted, total_words)
            sent = _build_sentence(rng, label, plant, name_source)
            if plant is not None:
                planted[plant] += _PLANT_COST[plant]
            total_words += len(sent.tokens)
            sentences.append(sent)
        documents.append(Document(doc_id=f"synth-{i:04d}", label=label, sentences=tuple(sentences)))
    return Corpus(tuple(documents))
