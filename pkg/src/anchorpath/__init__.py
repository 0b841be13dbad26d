"""Path-based knowledge-graph relation prediction.

Pipeline: load and inverse-augment a triple store, mine anchored and
closed paths, filter relation chains by accuracy/recall, verbalize
evidence into sentences, score candidates by embedding similarity, and
evaluate rankings with MRR / Hit@1.
"""

from .graph import Graph, augment_inverses, graph_stats, load_triples, relation_heads
from .paths import (
    Path,
    PathCategory,
    chain_endpoints,
    classify_path,
    decompose_concatenated,
    enumerate_anchoring_paths,
    enumerate_closed_paths,
    relation_chain,
)
from .filtering import (
    APStatistics,
    EntityCategoryCounts,
    LogicalAPStore,
    ap_metrics,
    build_logical_ap_store,
    classify_entities,
    collect_chain_heads,
    match_query_aps,
)
from .text import DescriptionStore, HashedEncoder, RemoteEncoder, hashed_embedding
from .scoring import (
    LossConfig,
    cosine_embedding_loss,
    cosine_similarity,
    generate_training_pairs,
    triplet_score,
)
from .evaluation import (
    CandidateSet,
    RankingResult,
    aggregate_metrics,
    rank_candidates,
    run_experiment,
)
from .config import RunConfig

__version__ = "0.1.0"
