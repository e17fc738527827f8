"""gapquest: identify missing information in a text context by differencing
a class-level global schema against the context's own schema, then retrieve
and re-rank clarification questions about the gap."""

from .classes import (
    ClassAssignment,
    KMeansResult,
    TfIdfVector,
    choose_k,
    cluster_dialog_classes,
    kmeans,
    split_hierarchy_classes,
    tfidf,
)
from .conllu import ConlluError, ParsedSentence, Token, parse_conllu, serialize_conllu
from .corpus import Block, Context, CorpusError, TargetQuestion, load_contexts
from .embeddings import (
    EmbeddingError,
    EmbeddingTable,
    cosine,
    embed_phrase,
    load_embeddings,
    phrase_similarity,
    phrases_match,
)
from .globalschema import (
    ElementCluster,
    GlobalSchema,
    MissingSchema,
    build_global_schema,
    cluster_keyphrases,
    extend_global,
    missing_schema,
)
from .keyphrase import KeyPhrase, extract_keyphrases, extract_keyphrases_text, load_stopwords
from .metrics import (
    bleu4,
    bleu4_sentence,
    distinct2,
    length_stats,
    meteor_lite,
    missinfo_overlap,
    robustness_report,
)
from .pipeline import build_class_globals, context_keyphrases, context_schema, local_schemas
from .retrieval import (
    QuestionIndex,
    RankedCandidate,
    build_index,
    overlap_score,
    rerank_useful,
    retrieve,
)
from .schema import (
    Schema,
    SchemaElement,
    extract_sentence_schema,
    local_schema,
    merge_bigram_nodes,
)
from .usefulness import (
    LabeledQuestion,
    TrainConfig,
    UsefulnessModel,
    binarize_scores,
    make_negative_samples,
    train_usefulness,
    usefulness_score,
)

__version__ = "0.1.0"
