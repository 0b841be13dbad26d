import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anchorpath.errors import ContractError, ParseError
from anchorpath.graph import Graph, augment_inverses
from anchorpath.paths import Path
from anchorpath.text import (
    DescriptionStore,
    HashedEncoder,
    Sentence,
    encode,
    format_path_sentence,
    format_query_sentence,
    get_encoder,
    hashed_embedding,
    load_descriptions,
    MAX_SENTENCE_TOKENS,
)


@pytest.fixture
def toy():
    g = augment_inverses(
        Graph([("h", "a", "m"), ("m", "b", "t"), ("Morgan", "Perform", "TSR"), ("Drama", "Genre", "TSR")])
    )
    store = DescriptionStore(
        short={"h": "h-short", "t": "t-short"},
        detailed={"h": "D_h", "t": "D_t", "Morgan": "D_Morgan", "Drama": "D_Drama"},
    )
    return g, store


class TestDescriptionStore:
    def test_load_detailed(self, tmp_path):
        f = tmp_path / "d.txt"
        f.write_text("Morgan\tAmerican actor and producer\n", encoding="utf-8")
        store = DescriptionStore()
        load_descriptions(f, "detailed", store)
        assert store.describe("Morgan") == "American actor and producer"

    def test_fallback_to_surface(self):
        assert DescriptionStore().describe("Unknown") == "Unknown"

    def test_detailed_wins_over_short(self):
        store = DescriptionStore(short={"e": "short"}, detailed={"e": "long"})
        assert store.describe("e", "detailed") == "long"
        assert store.describe("e", "short") == "short"

    def test_duplicates_overwrite_with_count(self, tmp_path):
        f = tmp_path / "d.txt"
        f.write_text("e\tfirst\ne\tsecond\n", encoding="utf-8")
        store = DescriptionStore()
        assert load_descriptions(f, "short", store) == 1
        assert store.short["e"] == "second"

    def test_malformed_line(self, tmp_path):
        f = tmp_path / "d.txt"
        f.write_text("ok\tfine\nbroken-line\n", encoding="utf-8")
        with pytest.raises(ParseError) as exc:
            load_descriptions(f, "short", DescriptionStore())
        assert exc.value.line_number == 2


class TestSentenceFormation:
    def test_cp_template(self, toy):
        g, store = toy
        p = Path(
            (g.entity_id("h"), g.entity_id("m"), g.entity_id("t")),
            (g.relation_id("a"), g.relation_id("b")),
        )
        s = format_path_sentence(g, p, "CP", store)
        assert s.text == "h D_h a m b t D_t"

    def test_ap_template(self, toy):
        g, store = toy
        p = Path(
            (g.entity_id("Morgan"), g.entity_id("TSR"), g.entity_id("Drama")),
            (g.relation_id("Perform"), g.relation_id("Genre^-1")),
        )
        s = format_path_sentence(g, p, "AP", store)
        assert s.text == "Morgan D_Morgan Perform Genre^-1 Drama D_Drama"

    def test_query_template(self, toy):
        g, store = toy
        s = format_query_sentence(g, (g.entity_id("h"), g.relation_id("a"), g.entity_id("t")), store)
        assert s.text == "h D_h a t D_t"

    def test_fallback_dedup(self, toy):
        g, _ = toy
        s = format_query_sentence(
            g, (g.entity_id("h"), g.relation_id("a"), g.entity_id("t")), DescriptionStore()
        )
        assert s.text == "h a t"

    def test_short_mode(self, toy):
        g, store = toy
        s = format_query_sentence(
            g, (g.entity_id("h"), g.relation_id("a"), g.entity_id("t")), store, mode="short"
        )
        assert s.text == "h h-short a t t-short"

    def test_truncation(self, toy):
        g, _ = toy
        store = DescriptionStore(detailed={"h": " ".join(["w"] * 600)})
        s = format_query_sentence(g, (g.entity_id("h"), g.relation_id("a"), g.entity_id("t")), store)
        assert len(s.text.split()) == MAX_SENTENCE_TOKENS

    def test_golden_toy_file(self, toy):
        g, store = toy
        triple = (g.entity_id("Morgan"), g.relation_id("Perform"), g.entity_id("TSR"))
        assert format_query_sentence(g, triple, store).text == "Morgan D_Morgan Perform TSR"


class TestHashedEncoder:
    def test_deterministic(self):
        enc = HashedEncoder()
        a = enc.encode(["the same sentence"])
        b = enc.encode(["the same sentence"])
        assert np.array_equal(a, b)

    def test_unit_norm(self):
        enc = HashedEncoder()
        vecs = enc.encode(["one", "two tokens here", "a b c d e"])
        norms = np.linalg.norm(vecs, axis=1)
        assert np.allclose(norms, 1.0, atol=1e-9)

    def test_dim(self):
        assert HashedEncoder().encode(["x"]).shape == (1, 384)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.sampled_from("alpha beta gamma delta".split()), min_size=1, max_size=6))
    def test_locality(self, tokens):
        base = " ".join(tokens)
        changed = " ".join(tokens[:-1] + ["OMEGA"])
        assert not np.array_equal(hashed_embedding(base), hashed_embedding(changed))

    def test_order_preserving(self):
        enc = HashedEncoder()
        texts = ["aa", "bb", "cc"]
        batch = enc.encode(texts)
        singles = np.stack([enc.encode([t])[0] for t in texts])
        assert np.array_equal(batch, singles)

    def test_encode_sentences(self):
        sents = [Sentence("a b", "Query"), Sentence("c d", "AP")]
        out = encode(sents, HashedEncoder())
        assert out.shape == (2, 384)
        assert np.isfinite(out).all()


class TestGetEncoder:
    def test_builtin(self):
        assert isinstance(get_encoder("builtin"), HashedEncoder)

    def test_url(self):
        from anchorpath.text import RemoteEncoder

        enc = get_encoder("http://localhost:9999")
        assert isinstance(enc, RemoteEncoder)

    def test_bad_spec(self):
        with pytest.raises(ContractError):
            get_encoder("magic")
