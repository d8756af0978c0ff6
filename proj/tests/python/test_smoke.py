"""End-to-end smoke tests for the python bindings.

Deeper behavior is covered by the C++ unit and acceptance suites; these
check that the binding layer wires arguments, returns, files, and errors
correctly.
"""

import math

import pytest

import retsel


def small_benchmark():
    corpus = retsel.generate(n_docs=400, seed=97)
    visible, oracle = retsel.hold_out(corpus, visible_fraction=0.4, seed=97)
    return corpus, visible, oracle


def test_tokenize_and_stopwords():
    assert retsel.tokenize("I am EXERCISING, alone.") == ["i", "am", "exercising", "alone"]
    assert retsel.tokenize("we went to the gym", remove_stopwords=True) == ["went", "gym"]
    assert retsel.is_stopword("the")
    assert not retsel.is_stopword("gym")


def test_corpus_roundtrip(tmp_path):
    corpus = retsel.make_corpus(
        [
            ("d1", "gym workout", {"health": 1}),
            ("d2", "movie night", {"health": 0}),
            ("d3", "unlabeled text", {}),
        ],
        ["health"],
    )
    assert len(corpus) == 3
    assert corpus.labeled_ids() == ["d1", "d2"]
    assert corpus.doc("d1").tokens == ["gym", "workout"]

    path = str(tmp_path / "c.jsonl")
    retsel.write_jsonl(corpus, path)
    back = retsel.ingest_jsonl(path, ["health"])
    assert back.ids() == corpus.ids()
    assert back.doc("d2").labels == {"health": 0}


def test_generate_and_holdout():
    corpus, visible, oracle = small_benchmark()
    assert len(corpus) == 400
    assert corpus.categories == ["alone", "friends", "health"]
    assert len(visible.labeled_ids()) == 160
    hidden = set(corpus.ids()) - set(visible.labeled_ids())
    some_hidden = next(iter(sorted(hidden)))
    assert oracle.lookup(some_hidden, "health") in (0, 1)
    assert oracle.lookup("no-such-doc", "health") is None


def test_bm25_search_finds_planted():
    corpus, _, _ = small_benchmark()
    index = retsel.build_index(corpus)
    assert index.doc_count == 400
    hits = retsel.bm25_search(index, ["gym", "exercise"], 20)
    assert 0 < len(hits) <= 20
    positive = sum(corpus.doc(doc_id).labels["health"] for doc_id, _ in hits)
    assert positive / len(hits) >= 0.5
    assert all(score > 0 for _, score in hits)


def test_knn_and_fusion():
    corpus, _, _ = small_benchmark()
    matrix = retsel.embed_corpus(corpus, dim=64, seed=42)
    assert matrix.dim == 64 and len(matrix) == 400
    query = retsel.embed_query(["alone", "myself"], dim=64, seed=42)
    neighbors = retsel.knn_search(matrix, query, 30)
    assert len(neighbors) == 30
    distances = [d for _, d in neighbors]
    assert distances == sorted(distances)

    index = retsel.build_index(corpus)
    lex = [doc_id for doc_id, _ in retsel.bm25_search(index, ["alone", "myself"], 30)]
    vec = [doc_id for doc_id, _ in neighbors]
    fused = retsel.fuse_topk(lex, vec, 30)
    assert set(fused) <= set(lex) & set(vec)

    restricted = retsel.knn_search(matrix, query, 5, restrict_to=corpus.ids()[:5])
    assert {doc_id for doc_id, _ in restricted} <= set(corpus.ids()[:5])


def test_train_evaluate_suggest(tmp_path):
    _, visible, _ = small_benchmark()
    labeled = visible.labeled_ids()
    train_ids, val_ids, test_ids = retsel.split(visible, labeled, visible.categories)
    assert sorted(train_ids + val_ids + test_ids) == sorted(labeled)

    model = retsel.train(visible, train_ids, "health")
    assert model.category == "health"
    assert len(model.epoch_losses) == 10

    prob, label = retsel.predict(model, visible, train_ids[0])
    assert 0.0 <= prob <= 1.0 and label in (0, 1)

    report = retsel.evaluate(model, visible, test_ids, "health")
    assert set(report) >= {"macro_f1", "minority_f1", "per_class", "tp", "n_test"}
    assert report["n_test"] == len(test_ids)

    suggestions = retsel.suggest_query_terms(model, visible, train_ids, "health")
    top_terms = [term for term, _ in suggestions[:5]]
    assert "health" in top_terms or "gym" in top_terms

    phi, base = retsel.shap_values(model, visible, train_ids[0])
    assert len(phi) == len(model.weights)
    prob, _ = retsel.predict(model, visible, train_ids[0])
    if 1e-9 < prob < 1 - 1e-9:  # local accuracy: sum(phi) + base == logit
        assert sum(phi) + base == pytest.approx(math.log(prob / (1 - prob)), abs=1e-6)

    path = str(tmp_path / "model.txt")
    retsel.save_model(model, path)
    loaded = retsel.load_model(path)
    assert loaded.weights == model.weights
    assert loaded.bias == model.bias


def test_precision_at_k():
    truth = {"a": 1, "b": 0, "c": 1, "d": 1}
    assert retsel.precision_at_k(["a", "b", "c"], truth, 2) == 0.5
    with pytest.raises(RuntimeError):
        retsel.precision_at_k(["a", "zz"], truth, 2)


def test_embeddings_file_roundtrip(tmp_path):
    matrix = retsel.EmbeddingMatrix(3, "unit-test")
    assert not matrix.add("x", [0.0, 1.0, 0.0])
    assert matrix.add("y", [0.0, 2.0, 0.0])  # renormalized
    path = str(tmp_path / "emb.txt")
    retsel.save_embeddings(matrix, path)
    back, renormalized = retsel.load_embeddings(path)
    assert renormalized == 0
    assert back.row("y") == [0.0, 1.0, 0.0]


def test_query_file_roundtrip(tmp_path):
    path = str(tmp_path / "queries.txt")
    retsel.write_query_file({"health": ["gym", "exercise"], "alone": ["myself"]}, path)
    assert retsel.read_query_file(path) == {
        "alone": ["myself"],
        "health": ["gym", "exercise"],
    }


def test_campaign_runs_and_is_deterministic():
    corpus = retsel.generate(n_docs=300, seed=97)
    visible, oracle = retsel.hold_out(corpus, visible_fraction=0.4, seed=97)
    kwargs = dict(rounds=1, k_lex=30, k_vec=30, cap=10, budget=200, embed_dim=64, epochs=5)
    report = retsel.run_campaign(visible, oracle, **kwargs)
    # (rounds + 1) per-round rows x categories x two arms
    assert len(report["rows"]) == 2 * 3 * 2
    assert {row["arm"] for row in report["rows"]} == {"fused", "random"}
    assert report["csv"].splitlines()[0].startswith("round,category,arm")
    assert "health" in report["summary"]

    again = retsel.run_campaign(visible, oracle, **kwargs)
    assert again["csv"] == report["csv"]


def test_error_mapping():
    corpus = retsel.make_corpus([("d1", "gym", {"health": 1})], ["health"])
    index = retsel.build_index(corpus)
    with pytest.raises(ValueError):
        retsel.bm25_search(index, ["gym"], 0)  # usage error: k must be positive
    with pytest.raises(RuntimeError):
        corpus.doc("missing")  # data error: unknown id
    with pytest.raises(ValueError):
        retsel.train(corpus, ["d1"], "health", loss="perceptron")
