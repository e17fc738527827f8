import itertools

import pytest

from conftest import compact_sentence

from gapquest.corpus import Block, Context
from gapquest.keyphrase import KeyPhrase, extract_keyphrases
from gapquest.schema import (
    Schema,
    SchemaElement,
    extract_sentence_schema,
    local_schema,
    merge_bigram_nodes,
)


def kp(*words):
    return KeyPhrase(words=tuple(words), score=0.1, span=(0, (0, 0)))


def test_merge_bigram_takes_outer_head(bag_sentence):
    merged = merge_bigram_nodes(bag_sentence, kp("gaming", "laptop"))
    node = merged.token(6)
    assert node.lemma == "gaming laptop"
    # 'laptop' carried the attachment out of the pair: keep its head/deprel
    assert node.head == 4
    assert node.deprel == "obj"
    assert node.upos == "NOUN"
    # children of both constituents re-attach to the merged node
    assert merged.token(10).head == 6
    assert merged.token(5).head == 6
    assert not merged.has_index(7)


def test_merge_unigram_is_noop(bag_sentence):
    assert merge_bigram_nodes(bag_sentence, kp("bag")) is bag_sentence


def test_merge_refuses_unlinked_pair(caplog):
    # 'spare' and 'memory' both attach to 'card', not to each other
    sent = compact_sentence("""
        spare spare ADJ JJ 3 amod
        memory memory NOUN NN 3 compound
        card card NOUN NN 0 root
    """)
    with caplog.at_level("WARNING"):
        out = merge_bigram_nodes(sent, kp("spare", "memory"))
    assert out is sent
    assert "not merged" in caplog.text


def test_fig2_sentence_schema(bag_sentence):
    phrases = extract_keyphrases([bag_sentence], top_k=5)
    schema = extract_sentence_schema(bag_sentence, phrases)
    # manual trace: bag is an immediate nsubj child of hold; the merged
    # gaming-laptop node is an immediate obj child; iPad walks up through
    # the merged node, so it inherits that node's obj relation
    assert SchemaElement(("bag",), "hold", "nsubj") in schema
    assert SchemaElement(("gaming", "laptop"), "hold", "obj") in schema
    assert SchemaElement(("ipad",), "hold", "obj") in schema
    assert all(el.verb == "hold" for el in schema if el.kind == "triple")


def test_relations_lie_on_tree_path(bag_sentence):
    # the iPad relation (obj) is the label of a node on the iPad-to-hold path
    phrases = [kp("ipad")]
    schema = extract_sentence_schema(bag_sentence, phrases)
    (el,) = list(schema)
    path_deprels = {bag_sentence.token(10).deprel}
    path_deprels.update(t.deprel for t in bag_sentence.ancestors(10))
    assert el.relation in path_deprels


def test_no_verbs_all_bare():
    sent = compact_sentence("""
        Sony sony PROPN NNP 2 compound
        camcorder camcorder NOUN NN 0 root
        with with ADP IN 5 case
        digital digital ADJ JJ 5 amod
        zoom zoom NOUN NN 2 nmod
    """)
    schema = extract_sentence_schema(sent, [kp("camcorder"), kp("digital", "zoom")])
    assert {el.kind for el in schema} == {"bare"}


def test_immediate_child_uses_own_relation():
    sent = compact_sentence("""
        bag bag NOUN NN 2 nsubj
        holds hold VERB VBZ 0 root
        laptops laptop NOUN NNS 2 obj
    """)
    schema = extract_sentence_schema(sent, [kp("bag")])
    assert list(schema) == [SchemaElement(("bag",), "hold", "nsubj")]


def test_nearest_verb_wins_on_path_length():
    # v1 governs v2 governs the noun: the depth-1 verb (v2) must be chosen
    sent = compact_sentence("""
        tries try VERB VBZ 0 root
        holding hold VERB VBG 1 xcomp
        laptops laptop NOUN NNS 2 obj
    """)
    schema = extract_sentence_schema(sent, [kp("laptop")])
    (el,) = list(schema)
    assert el.verb == "hold"
    assert el.relation == "obj"


def test_vbp_and_vbn_are_not_triple_verbs():
    sent = compact_sentence("""
        speakers speaker NOUN NNS 2 nsubj
        deliver deliver VERB VBP 0 root
        sound sound NOUN NN 2 obj
    """)
    schema = extract_sentence_schema(sent, [kp("sound")])
    assert list(schema)[0].kind == "bare"


def test_every_phrase_yields_exactly_one_element(bag_sentence):
    phrases = [kp("bag"), kp("ipad"), kp("gaming", "laptop")]
    schema = extract_sentence_schema(bag_sentence, phrases)
    produced = {el.keyphrase for el in schema}
    assert produced == {("bag",), ("ipad",), ("gaming", "laptop")}
    assert len(schema) == 3


def _context(sent_specs: list, ctx_id="ctx"):
    sents = [compact_sentence(s) for s in sent_specs]
    return Context(
        id=ctx_id,
        scenario="communityQA",
        blocks=[Block("description", "")],
        sentences=[sents],
    )


S_BAG = """
    bag bag NOUN NN 2 nsubj
    holds hold VERB VBZ 0 root
    laptops laptop NOUN NNS 2 obj
"""
S_CASE = """
    case case NOUN NN 2 nsubj
    fits fit VERB VBZ 0 root
    tripods tripod NOUN NNS 2 obj
"""


def test_local_schema_single_sentence_identity():
    ctx = _context([S_BAG])
    phrases = [[kp("bag"), kp("laptop")]]
    assert local_schema(ctx, phrases).elements == extract_sentence_schema(
        ctx.sentences[0][0], phrases[0]
    ).elements


def test_local_schema_duplicate_sentence_dedups():
    once = local_schema(_context([S_BAG]), [[kp("bag")]])
    twice = local_schema(_context([S_BAG, S_BAG]), [[kp("bag")], [kp("bag")]])
    assert once.elements == twice.elements


def test_local_schema_disjoint_sizes_add():
    phrases = [[kp("bag"), kp("laptop")], [kp("case"), kp("tripod"), kp("tripods")]]
    # "tripods" is not a lemma in the tree: anchored via constituent, bare vs
    # triple still distinct elements -> sizes 2 and 3 union to 5
    schema = local_schema(_context([S_BAG, S_CASE]), phrases)
    assert len(schema) == 5


def test_local_schema_order_invariant():
    perms = []
    for order in itertools.permutations([S_BAG, S_CASE]):
        ctx = _context(list(order))
        phrase_map = {S_BAG: [kp("bag"), kp("laptop")], S_CASE: [kp("case")]}
        perms.append(local_schema(ctx, [phrase_map[s] for s in order]).elements)
    assert perms[0] == perms[1]


def test_local_schema_length_mismatch_rejected():
    with pytest.raises(ValueError):
        local_schema(_context([S_BAG]), [])


def test_schema_json_roundtrip(bag_sentence):
    phrases = extract_keyphrases([bag_sentence], top_k=5)
    schema = extract_sentence_schema(bag_sentence, phrases)
    assert Schema.from_json(schema.to_json()).elements == schema.elements


def test_element_validation():
    with pytest.raises(ValueError):
        SchemaElement(("x",), verb="have", relation=None)
