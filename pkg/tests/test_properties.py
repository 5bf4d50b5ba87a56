"""Property-based checks for the structural invariants."""

import hypothesis.strategies as st
from hypothesis import given, settings

from conftest import brute_force_np_vp
from fragshare.assembler import AssemblyConfig
from fragshare.audit import lexicon_from_terms, scan_identifiers
from fragshare.chunker import Fragment, build_pool, extract_tree, filter_rare
from fragshare.dataset import SplitSpec, split
from fragshare.ingest import parse_bracketed, parse_canonical, parse_tagged, write_bracketed, write_canonical, write_tagged
from fragshare.model import Corpus, Document, Sentence, Token, TreeNode

WORDS = ("pain", "dose", "scan", "the", "mild", "denies", "was", "chest", "a", "on")
POS_TAGS = ("NN", "DT", "JJ", "VBZ", "VBD", "IN")
NODE_LABELS = ("S", "NP", "VP", "PP", "ADJP", "NP-SBJ", "VP=1", "NP-TMP-2", "SBAR")


@st.composite
def tree_sentences(draw):
    n = draw(st.integers(min_value=1, max_value=9))
    forms = [draw(st.sampled_from(WORDS)) for _ in range(n)]
    pos = [draw(st.sampled_from(POS_TAGS)) for _ in range(n)]

    def build(lo, hi, depth):
        if hi - lo == 1 and (depth > 3 or draw(st.booleans())):
            return TreeNode(pos[lo], leaf=lo)
        if hi - lo == 1:
            return TreeNode(draw(st.sampled_from(NODE_LABELS)), (TreeNode(pos[lo], leaf=lo),))
        k = draw(st.integers(min_value=2, max_value=min(4, hi - lo)))
        cuts = sorted(draw(st.lists(st.integers(lo + 1, hi - 1), min_size=k - 1, max_size=k - 1, unique=True)))
        bounds = [lo, *cuts, hi]
        children = tuple(build(bounds[i], bounds[i + 1], depth + 1) for i in range(len(bounds) - 1))
        return TreeNode(draw(st.sampled_from(NODE_LABELS)), children)

    root = build(0, n, 0)
    tokens = tuple(Token(form=f, pos=p) for f, p in zip(forms, pos))
    return Sentence(tokens=tokens, tree=root)


@st.composite
def treed_documents(draw):
    sentences = tuple(draw(st.lists(tree_sentences(), min_size=1, max_size=4)))
    label = draw(st.sampled_from(("case", "control", None)))
    return Document(doc_id="prop-doc", label=label, sentences=sentences)


@settings(max_examples=80, deadline=None)
@given(treed_documents())
def test_extract_tree_equals_brute_force_enumeration(doc):
    got = {(f.kind, f.words, f.sent_idx, f.span) for f in extract_tree(doc)}
    assert got == brute_force_np_vp(doc)


@st.composite
def corpora(draw, min_docs=2, max_docs=6, with_trees=False):
    n_docs = draw(st.integers(min_docs, max_docs))
    docs = []
    for i in range(n_docs):
        if with_trees:
            sentences = tuple(draw(st.lists(tree_sentences(), min_size=1, max_size=3)))
        else:
            sentences = tuple(
                Sentence(
                    tokens=tuple(
                        Token(form=draw(st.sampled_from(WORDS)), pos=draw(st.sampled_from(POS_TAGS)))
                        for _ in range(draw(st.integers(1, 6)))
                    )
                )
                for _ in range(draw(st.integers(1, 3)))
            )
        docs.append(Document(doc_id=f"doc-{i}", label=draw(st.sampled_from(("case", "control", None))), sentences=sentences))
    return Corpus(tuple(docs))


@settings(max_examples=60, deadline=None)
@given(corpora(with_trees=True))
def test_canonical_and_bracketed_round_trips(corpus):
    # constituent labels normalize on the first parse; round trips are exact after that
    normalized = parse_bracketed(write_bracketed(corpus))
    assert parse_canonical(write_canonical(normalized)) == normalized
    assert parse_bracketed(write_bracketed(normalized)) == normalized


@settings(max_examples=60, deadline=None)
@given(corpora(with_trees=False))
def test_tagged_round_trip_preserves_tokens(corpus):
    reparsed = parse_tagged(write_tagged(corpus))
    assert reparsed == corpus
    columns = parse_tagged(write_tagged(corpus, columns=True))
    assert columns == corpus


@st.composite
def pools(draw):
    corpus = draw(corpora(min_docs=2, max_docs=5, with_trees=True))
    frags = []
    for doc in corpus.documents:
        frags.extend(extract_tree(doc, 1, 4))
    return corpus, build_pool(corpus, frags)


@settings(max_examples=40, deadline=None)
@given(pools(), st.integers(1, 4))
def test_filter_rare_idempotent_and_monotone(pool_pair, k):
    _, pool = pool_pair
    once = filter_rare(pool, k)
    assert filter_rare(once, k).fragments == once.fragments
    assert set(filter_rare(pool, k + 1).fragments) <= set(once.fragments)
    for f in once.fragments:
        assert once.doc_freq[f.surface] >= k


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.lists(st.sampled_from(WORDS + ("boston", "john", "smith")), max_size=8), max_size=6),
    st.booleans(),
)
def test_scan_counts_bounded_by_totals(units, multiword):
    terms = {"name": ["john smith"] if multiword else ["john", "smith"], "location": ["boston"]}
    lex = lexicon_from_terms(terms)
    scan = scan_identifiers(units, lex)
    total = sum(len(u) for u in units)
    assert scan.total_words == total
    assert 0 <= scan.matched_words <= total
    # disjoint categories: per-category counts sum to the union
    assert sum(scan.category_words.values()) == scan.matched_words
    again = scan_identifiers(units, lex)
    assert again == scan


@st.composite
def labeled_corpora(draw):
    docs = []
    for label in ("case", "control"):
        n = draw(st.integers(10, 25))
        for i in range(n):
            docs.append(
                Document(
                    doc_id=f"{label}-{i}",
                    label=label,
                    sentences=(Sentence(tokens=(Token("w", "NN"),)),),
                )
            )
    return Corpus(tuple(docs))


@settings(max_examples=40, deadline=None)
@given(labeled_corpora(), st.integers(0, 2**31), st.floats(0.05, 0.5))
def test_split_is_a_partition(corpus, seed, fraction):
    train, test = split(corpus, SplitSpec(seed=seed, test_fraction=fraction))
    train_ids = {d.doc_id for d in train.documents}
    test_ids = {d.doc_id for d in test.documents}
    assert train_ids.isdisjoint(test_ids)
    assert train_ids | test_ids == {d.doc_id for d in corpus.documents}
    assert len(test.documents) == round(fraction * len(corpus.documents))


def test_order_patterns_cover_all_permutations():
    import itertools

    for perm in set(itertools.permutations(("NP", "NP", "VP", "VP"))):
        AssemblyConfig(seed=0, order=perm)


@settings(max_examples=40, deadline=None)
@given(pools())
def test_pool_doc_freq_at_least_one(pool_pair):
    corpus, pool = pool_pair
    for f in pool.fragments:
        assert pool.doc_freq[f.surface] >= 1
