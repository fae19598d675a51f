import pytest

from knnseq_exporter import ExporterError, read_taxonomy
from knnseq_exporter.taxonomy import Taxonomy


class TestTaxonomy:
    def test_label_space_sizes(self, taxonomy):
        assert taxonomy.main_label_count == 5
        assert taxonomy.sub_label_count == 4
        full = Taxonomy(
            main_types=tuple(f"M{i}" for i in range(21)),
            sub_types=tuple(f"S{i}" for i in range(31)),
        )
        assert full.main_label_count == 43
        assert full.sub_label_count == 62

    def test_tag_membership(self, taxonomy):
        assert taxonomy.is_main_tag("O")
        assert taxonomy.is_main_tag("B-PERS")
        assert taxonomy.is_main_tag("I-ORG")
        assert not taxonomy.is_main_tag("B-GOV")
        assert taxonomy.is_sub_tag("B-GOV")
        assert taxonomy.is_sub_tag("I-COM")
        assert not taxonomy.is_sub_tag("O")

    def test_read_from_file(self, tagset_file, taxonomy):
        loaded = read_taxonomy(tagset_file)
        assert loaded == taxonomy

    def test_hash_matches_documented_construction(self, taxonomy):
        import hashlib

        canonical = "tagset-v1\nmain:\nPERS\nORG\nsub:\nGOV\nCOM\n"
        assert taxonomy.hash_hex == hashlib.sha256(canonical.encode()).hexdigest()

    @pytest.mark.parametrize("text,pattern", [
        ("tagset-v9\nmain:\nA\nsub:\n", "line 1"),
        ("tagset-v1\nmain:\nsub:\n", "empty main"),
        ("tagset-v1\nX\nmain:\nA\nsub:\n", "outside any section"),
        ("tagset-v1\nmain:\nA\n", "missing"),
    ])
    def test_errors(self, tmp_path, text, pattern):
        path = tmp_path / "bad.tagset"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ExporterError, match=pattern):
            read_taxonomy(path)
