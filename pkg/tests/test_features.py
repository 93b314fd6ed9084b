import pytest
from hypothesis import given
from hypothesis import strategies as st

from hmmner.corpus import tokenize
from hmmner.features import (META_TAGS, SEP, GazetteerSet, PseudoToken,
                             assign_meta_tag, assign_x_tag, featurize_sentence,
                             is_abbreviation, observation_key,
                             parse_observation_key)

# One witness per code, traced through every rule block in order.
META_WITNESSES = [
    ("hello", "YYYY"),
    ("Delhi", "ICAP"),
    ("BJP", "ABBR"),
    ("U.S.", "ABBR"),
    ("#Delhi", "CHAS"),
    ("#delhi", "HASH"),
    ("@user", "ATSY"),
    ("Note:", "CCOL"),
    ("note:", "COLN"),
    ("Jean-Luc", "CHYP"),
    ("well-known", "HYPH"),
    ("2015", "DFOR"),
    ("15", "DTWO"),
    ("7", "DONE"),
    ("3pm", "DIGT"),
    ("1,000", "DCOM"),
    ("Modi,", "CLCO"),
    ("hello,", "LCOM"),
    ("Delhi,Mumbai,Pune", "CMCO"),
    ("...", "ALDT"),
]


@pytest.mark.parametrize("token, expected", META_WITNESSES)
def test_meta_tag_witness(token, expected):
    assert assign_meta_tag(token) == expected


def test_witnesses_cover_every_code():
    assert {code for _, code in META_WITNESSES} == set(META_TAGS)


@pytest.mark.parametrize("token, expected", [
    # later blocks overwrite earlier ones
    ("@user1", "DIGT"),
    ("#FIFA2015", "DIGT"),
    ("#2015", "DIGT"),
    ("BJP:", "CCOL"),
    ("ab-c", "YYYY"),   # hyphen before index 3
    ("abc-d", "HYPH"),
    ("Delhi,", "CLCO"),
    ("a,b,", "YYYY"),   # two commas, lowercase: no comma rule fires
    (".", "ALDT"),
])
def test_meta_tag_cascade_order(token, expected):
    assert assign_meta_tag(token) == expected


def test_aldt_digit_reading_is_opt_in():
    assert assign_meta_tag("2015") == "DFOR"
    assert assign_meta_tag("2015", aldt_means_all_digits=True) == "ALDT"
    assert assign_meta_tag("...", aldt_means_all_digits=True) == "YYYY"


def test_position_does_not_change_tag():
    assert assign_meta_tag("BJP", 0) == assign_meta_tag("BJP", 5)


@pytest.mark.parametrize("token, expected", [
    ("BJP", True), ("U.S.", True), ("A", False), ("Delhi", False), ("..", False),
    ("B2B", False)])
def test_abbreviation_predicate(token, expected):
    assert is_abbreviation(token) is expected


@given(st.text(min_size=1, max_size=12))
def test_meta_tag_total_and_deterministic(token):
    tag = assign_meta_tag(token)
    assert tag in META_TAGS
    assert assign_meta_tag(token) == tag


@pytest.fixture
def gaz():
    return GazetteerSet({
        "bperson": ["Ram", "Paris"],
        "blocation": ["Paris", "new", "Delhi"],
        "months": ["January"],
        "monetary": ["lakh"],
    })


def test_x_tag_month(gaz):
    assert assign_x_tag("January", "NNP", gaz) == "MONT"


def test_x_tag_default(gaz):
    assert assign_x_tag("running", "VBG", gaz) == "VBG"


def test_x_tag_strips_symbols(gaz):
    assert assign_x_tag("#Ram,", "NNP", gaz) == "BPER"
    assert assign_x_tag("@lakh:", "NN", gaz) == "MONY"
    assert assign_x_tag("De.lhi", "NNP", gaz) == "BLOC"


def test_x_tag_precedence(gaz):
    assert assign_x_tag("Paris", "NNP", gaz) == "BPER"


def test_x_tag_case_insensitive(gaz):
    assert assign_x_tag("JANUARY", "NNP", gaz) == "MONT"


def test_single_char_not_stripped():
    g = GazetteerSet({"count_expr": ["#"]})
    assert assign_x_tag("#", "SYM", g) == "COUN"


def test_gazetteer_sizes_and_load(tmp_path):
    (tmp_path / "bperson.txt").write_text("# first names\nRam\nSita\n\n", encoding="utf-8")
    (tmp_path / "months.txt").write_text("January\n", encoding="utf-8")
    g = GazetteerSet.load(tmp_path)
    assert g.sizes()["bperson"] == 2
    assert g.sizes()["months"] == 1
    assert g.sizes()["days"] == 0
    assert g.lookup("sita") == "BPER"


def test_gazetteer_missing_dir(tmp_path):
    with pytest.raises(FileNotFoundError):
        GazetteerSet.load(tmp_path / "nope")


def test_unknown_list_name():
    with pytest.raises(ValueError):
        GazetteerSet({"cities": ["x"]})


def test_featurize_empty(gaz):
    assert featurize_sentence([], [], gaz) == []


def test_featurize_new_delhi():
    g = GazetteerSet({"blocation": ["new"]})
    out = featurize_sentence(tokenize("New Delhi"), ["NNP", "NNP"], g)
    assert out == [PseudoToken("New", "BLOC", "ICAP"), PseudoToken("Delhi", "NNP", "ICAP")]


def test_featurize_hashtag_with_digits(gaz):
    (p,) = featurize_sentence(["#FIFA2015"], ["NNP"], gaz)
    assert p.x_tag == "NNP"
    assert p.meta_tag == "DIGT"


def test_featurize_length_mismatch(gaz):
    with pytest.raises(ValueError):
        featurize_sentence(tokenize("a b"), ["NN"], gaz)


def test_featurize_rejects_reserved_pos(gaz):
    with pytest.raises(ValueError, match="collides"):
        featurize_sentence(["x"], ["BPER"], gaz)


def test_observation_key_join():
    assert observation_key(PseudoToken("Delhi", "BLOC", "ICAP")) == f"Delhi{SEP}BLOC{SEP}ICAP"


def test_observation_key_round_trip_and_injective():
    a = PseudoToken("Delhi", "BLOC", "ICAP")
    b = PseudoToken("Delhi", "NNP", "ICAP")
    assert observation_key(a) != observation_key(b)
    assert parse_observation_key(observation_key(a)) == a


def test_separator_rejected_in_fields():
    with pytest.raises(ValueError, match="separator"):
        PseudoToken(f"a{SEP}b", "NN", "YYYY")
