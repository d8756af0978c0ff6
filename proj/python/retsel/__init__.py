"""Retrieval-driven text selection.

Fused BM25 + dense-vector search with exact linear-SHAP query suggestion,
plus a deterministic simulator for multi-round annotation campaigns under
class imbalance. Thin wrapper over the C++ core; see the function
docstrings on :mod:`retsel._core` for contracts.
"""

from ._core import (
    Corpus,
    Document,
    EmbeddingMatrix,
    InvertedIndex,
    LinearModel,
    Oracle,
    bm25_search,
    build_index,
    embed_corpus,
    embed_query,
    evaluate,
    fuse_topk,
    generate,
    hash_embed,
    hold_out,
    ingest_jsonl,
    is_stopword,
    knn_search,
    load_embeddings,
    load_model,
    make_corpus,
    precision_at_k,
    predict,
    read_query_file,
    run_campaign,
    save_embeddings,
    save_model,
    shap_values,
    split,
    suggest_query_terms,
    tokenize,
    train,
    write_jsonl,
    write_query_file,
)

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "Document",
    "EmbeddingMatrix",
    "InvertedIndex",
    "LinearModel",
    "Oracle",
    "bm25_search",
    "build_index",
    "embed_corpus",
    "embed_query",
    "evaluate",
    "fuse_topk",
    "generate",
    "hash_embed",
    "hold_out",
    "ingest_jsonl",
    "is_stopword",
    "knn_search",
    "load_embeddings",
    "load_model",
    "make_corpus",
    "precision_at_k",
    "predict",
    "read_query_file",
    "run_campaign",
    "save_embeddings",
    "save_model",
    "shap_values",
    "split",
    "suggest_query_terms",
    "tokenize",
    "train",
    "write_jsonl",
    "write_query_file",
]
