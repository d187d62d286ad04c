"""Unit tests for chrF++, ADI2 and the combined objective."""

import itertools
import random
from collections import Counter

import pytest

from dialectmbr.exceptions import EmptyCorpusError, ObjectiveRangeError, ScorerMismatchError
from dialectmbr.metrics import (
    ChrfUtility,
    DialectScorer,
    PreparedUtility,
    adi2,
    chrfpp_corpus,
    chrfpp_from_profiles,
    chrfpp_sentence,
    combined_objective,
    extract_profile,
    order_statistics,
)
from dialectmbr.models.metrics import ChrfConfig, DialectScore, NGramProfile

EPS = 1e-16


def _ngrams(units: list[str], n: int, joiner: str) -> Counter:
    return Counter(joiner.join(units[i : i + n]) for i in range(len(units) - n + 1))


def _oracle_stats(hyp: str, ref: str, max_char_n: int = 6, max_word_n: int = 2) -> list[tuple[int, int, int]]:
    """Enumerate all n-grams by brute force and count clipped matches."""
    stats = []
    for units_h, units_r, max_n, joiner in (
        (list(hyp.replace(" ", "")), list(ref.replace(" ", "")), max_char_n, ""),
        (hyp.split(), ref.split(), max_word_n, " "),
    ):
        for n in range(1, max_n + 1):
            grams_h = _ngrams(units_h, n, joiner)
            grams_r = _ngrams(units_r, n, joiner)
            matches = sum((grams_h & grams_r).values())
            stats.append((sum(grams_h.values()), sum(grams_r.values()), matches))
    return stats


def _oracle_fscore(stats: list[tuple[int, int, int]], beta: float = 2.0) -> float:
    scores = []
    for h, r, m in stats:
        if h == 0 and r == 0:
            continue
        p = m / h if h else EPS
        rc = m / r if r else EPS
        d = beta**2 * p + rc
        scores.append((1 + beta**2) * p * rc / d if d > 0 else 0.0)
    return sum(scores) / len(scores) if scores else 0.0


def _oracle_sentence(hyp: str, ref: str) -> float:
    return _oracle_fscore(_oracle_stats(hyp, ref))


def _oracle_corpus(pairs: list[tuple[str, str]]) -> float:
    totals = [[0, 0, 0] for _ in range(8)]
    for hyp, ref in pairs:
        for acc, stat in zip(totals, _oracle_stats(hyp, ref), strict=True):
            for i in range(3):
                acc[i] += stat[i]
    return _oracle_fscore([tuple(acc) for acc in totals])


#: Hand-picked sentence pairs: short strings over a small alphabet plus Arabic-script pairs.
ORACLE_PAIRS = [
    ("a", "a"),
    ("a", "b"),
    ("ab", "abc"),
    ("abc", "ab"),
    ("aaaa", "aa"),
    ("aa", "aaaa"),
    ("abab", "baba"),
    ("abcd", "dcba"),
    ("a b", "a b"),
    ("a b", "b a"),
    ("ab cd", "ab dc"),
    ("abc d", "abcd"),
    ("aa bb", "aa bb aa"),
    ("d", "dddd"),
    ("cab", "abc"),
    ("a a a", "a a"),
    ("bcd bcd", "bcd"),
    ("ab", ""),
    ("", "ab"),
    ("dcb a", "a bcd"),
    ("abcabc", "abc"),
    ("ca db", "ca db ca"),
    ("شو عم تعمل", "شو عم تساوي"),
    ("كيفاش داير", "كيف داير"),
    ("وش تبي الحين", "وش تبغى الحين"),
]


class TestExtractProfile:
    """Tests for extract_profile()."""

    def test_empty(self):
        """The empty string has an empty profile."""
        profile = extract_profile("")
        assert profile.is_empty()
        assert profile.char_ngrams == {}
        assert profile.word_ngrams == {}

    def test_repeated_character(self):
        """Repeated characters are counted with multiplicity."""
        profile = extract_profile("aa")
        assert profile.char_ngrams == {1: {"a": 2}, 2: {"aa": 1}}
        assert profile.word_ngrams == {1: {"aa": 1}}

    def test_whitespace_stripped(self):
        """Character n-grams skip whitespace, word n-grams are joined by a space."""
        profile = extract_profile("ab cd")
        assert profile.char_ngrams[1] == {"a": 1, "b": 1, "c": 1, "d": 1}
        assert profile.char_ngrams[4] == {"abcd": 1}
        assert profile.word_ngrams == {1: {"ab": 1, "cd": 1}, 2: {"ab cd": 1}}
        assert all(" " not in gram for table in profile.char_ngrams.values() for gram in table)

    def test_whitespace_kept(self):
        """Without stripping, whitespace is part of the character n-grams."""
        profile = extract_profile("a b", ChrfConfig(strip_whitespace=False))
        assert profile.char_ngrams[1] == {"a": 1, " ": 1, "b": 1}

    def test_orders_bounded(self):
        """No n-gram is longer than its configured maximal order."""
        config = ChrfConfig(max_char_n=3, max_word_n=1)
        profile = extract_profile("abcdef gh ij", config)
        assert max(profile.char_ngrams) == 3
        assert max(profile.word_ngrams) == 1

    def test_invalid_profile(self):
        """Profiles reject non-positive counts."""
        with pytest.raises(ValueError):
            NGramProfile(char_ngrams={1: {"a": 0}})


class TestChrfSentence:
    """Tests for chrfpp_sentence()."""

    def test_identical(self):
        """Identical strings score 1."""
        assert chrfpp_sentence("cat", "cat") == 1.0

    def test_empty_hypothesis(self):
        """An empty hypothesis scores 0."""
        assert chrfpp_sentence("", "cat") == 0.0

    def test_both_empty(self):
        """Without any n-gram on either side the score is 0."""
        assert chrfpp_sentence("", "") == 0.0

    @pytest.mark.parametrize("text", [" ", "\t\n", "   "])
    def test_identical_whitespace_only(self, text: str):
        """Identical whitespace-only strings score 0 like empty ones."""
        assert chrfpp_sentence(text, text) == 0.0

    def test_golden_value(self):
        """The short pair ('ab', 'abc') has the hand-enumerated score 20/63."""
        assert chrfpp_sentence("ab", "abc") == pytest.approx(20 / 63, abs=1e-12)
        assert chrfpp_sentence("ab", "abc") == pytest.approx(0.31746031746031744, abs=1e-12)

    @pytest.mark.parametrize(("hypothesis", "reference"), ORACLE_PAIRS)
    def test_oracle_pairs(self, hypothesis: str, reference: str):
        """Hand-picked pairs agree with the brute-force enumeration."""
        assert chrfpp_sentence(hypothesis, reference) == pytest.approx(
            _oracle_sentence(hypothesis, reference), abs=1e-9
        )

    def test_random_small_strings(self):
        """Random strings over a 4 letter alphabet agree with the brute-force enumeration."""
        rng = random.Random(42)
        for _ in range(300):
            hyp = "".join(rng.choice("ab c") for _ in range(rng.randint(0, 6)))
            ref = "".join(rng.choice("abc ") for _ in range(rng.randint(0, 6)))
            assert chrfpp_sentence(hyp, ref) == pytest.approx(_oracle_sentence(hyp, ref), abs=1e-9)

    def test_identity_and_bounds(self):
        """Every string with a non-space character scores 1 against itself; all scores are in [0, 1]."""
        rng = random.Random(7)
        for _ in range(200):
            text = rng.choice("abcd") + "".join(rng.choice("abcd ") for _ in range(rng.randint(0, 10)))
            other = "".join(rng.choice("abcd ") for _ in range(rng.randint(0, 10)))
            assert chrfpp_sentence(text, text) == 1.0
            assert 0.0 <= chrfpp_sentence(text, other) <= 1.0

    def test_whitespace_runs(self):
        """Runs of whitespace do not change the score."""
        assert chrfpp_sentence("a  b", "ab c") == chrfpp_sentence("a b", "ab c")
        assert order_statistics(extract_profile("a  b"), extract_profile("a b"), ChrfConfig()) == order_statistics(
            extract_profile("a b"), extract_profile("a b"), ChrfConfig()
        )

    def test_asymmetric(self):
        """Precision and recall are weighted differently."""
        assert chrfpp_sentence("ab", "abc") != chrfpp_sentence("abc", "ab")

    def test_plain_chrf(self):
        """Without word n-grams only character orders enter the average."""
        config = ChrfConfig(max_word_n=0)
        stats = _oracle_stats("ab", "abc", max_word_n=0)
        assert chrfpp_sentence("ab", "abc", config) == pytest.approx(_oracle_fscore(stats), abs=1e-12)


class TestChrfCorpus:
    """Tests for chrfpp_corpus()."""

    def test_single_pair(self):
        """One pair scores like the sentence-level metric."""
        assert chrfpp_corpus([("ab", "abc")]) == chrfpp_sentence("ab", "abc")

    def test_duplicated_pairs(self):
        """Duplicating every pair leaves the micro-average unchanged."""
        assert chrfpp_corpus([("ab", "abc")] * 3) == pytest.approx(chrfpp_sentence("ab", "abc"), abs=1e-12)

    def test_two_pairs_golden(self):
        """Summed statistics of two pairs give the hand computed value 631/1368."""
        assert chrfpp_corpus([("ab", "abc"), ("a", "a")]) == pytest.approx(631 / 1368, abs=1e-12)

    def test_oracle(self):
        """Random corpora agree with the brute-force summed-count computation."""
        rng = random.Random(3)
        for _ in range(50):
            pairs = [
                (
                    "".join(rng.choice("abc ") for _ in range(rng.randint(0, 8))),
                    "".join(rng.choice("abc ") for _ in range(rng.randint(0, 8))),
                )
                for _ in range(rng.randint(1, 5))
            ]
            assert chrfpp_corpus(pairs) == pytest.approx(_oracle_corpus(pairs), abs=1e-9)

    def test_permutation_invariant(self):
        """The order of pairs does not matter."""
        pairs = ORACLE_PAIRS[:6]
        expected = chrfpp_corpus(pairs)
        for permutation in itertools.islice(itertools.permutations(pairs), 50):
            assert chrfpp_corpus(list(permutation)) == expected

    def test_empty(self):
        """An empty corpus is an error."""
        with pytest.raises(EmptyCorpusError):
            chrfpp_corpus([])


class TestChrfUtility:
    """Tests for the cached chrF++ utility."""

    def test_protocol(self):
        """The utility supports the prepared path."""
        assert isinstance(ChrfUtility(), PreparedUtility)

    def test_cached_equals_uncached(self):
        """Scoring prepared profiles is bit-identical to scoring the strings."""
        utility = ChrfUtility()
        for hyp, ref in ORACLE_PAIRS:
            assert utility.score_prepared(utility.prepare(hyp), utility.prepare(ref)) == utility(hyp, ref)
            assert chrfpp_from_profiles(extract_profile(hyp), extract_profile(ref)) == chrfpp_sentence(hyp, ref)


def _score(aldi: float, prob: float, target: str = "syr") -> DialectScore:
    return DialectScore(aldi=aldi, nadi_probs={target: prob}, target_dialect=target)


class TestAdi2:
    """Tests for adi2()."""

    @pytest.mark.parametrize(
        ("aldi", "probs", "target", "expected"),
        [
            (0.8, {"syr": 0.5}, "syr", 0.4),
            (1.0, {"mor": 1.0}, "mor", 1.0),
            (0.0, {"sau": 0.9}, "sau", 0.0),
        ],
    )
    def test_examples(self, aldi: float, probs: dict[str, float], target: str, expected: float):
        """ADI2 is dialectness times the target probability."""
        assert adi2(DialectScore(aldi=aldi, nadi_probs=probs, target_dialect=target)) == pytest.approx(expected)

    def test_missing_target(self):
        """A score without the target dialect is a scorer/configuration mismatch."""
        with pytest.raises(ScorerMismatchError):
            adi2(DialectScore(aldi=0.5, nadi_probs={"mor": 0.5}, target_dialect="syr"))

    def test_grid(self):
        """Product law, bounds and monotonicity over a 1000 point grid."""
        aldis = [i / 39 for i in range(40)]
        probs = [j / 24 for j in range(25)]
        values = {}
        for aldi, prob in itertools.product(aldis, probs):
            value = adi2(_score(aldi, prob))
            assert value == aldi * prob
            assert 0.0 <= value <= 1.0
            values[aldi, prob] = value
        assert len(values) == 1000
        for i, j in itertools.product(range(39), range(24)):
            assert values[aldis[i], probs[j]] <= values[aldis[i + 1], probs[j]]
            assert values[aldis[i], probs[j]] <= values[aldis[i], probs[j + 1]]

    def test_invalid_score(self):
        """Dialect scores reject values outside of [0, 1]."""
        with pytest.raises(ValueError):
            _score(1.5, 0.5)
        with pytest.raises(ValueError):
            _score(0.5, -0.1)


class TestCombinedObjective:
    """Tests for combined_objective()."""

    def test_mean(self):
        """The default weight gives the arithmetic mean."""
        assert combined_objective(0.4, 0.6, 0.5) == pytest.approx(0.5)

    @pytest.mark.parametrize("weight", [0.0, 0.3, 0.5, 1.0])
    def test_fixed_point(self, weight: float):
        """Equal inputs are a fixed point for every weight."""
        assert combined_objective(0.7, 0.7, weight) == pytest.approx(0.7)

    def test_degenerate_weight(self):
        """Weight 1 selects the ADI2 component."""
        assert combined_objective(1.0, 0.0, 1.0) == 1.0

    @pytest.mark.parametrize(("a", "c", "w"), [(0.5, 0.5, 1.5), (0.5, 0.5, -0.1), (1.2, 0.5, 0.5), (0.5, -1.0, 0.5)])
    def test_out_of_range(self, a: float, c: float, w: float):
        """Inputs or weights outside of [0, 1] are errors."""
        with pytest.raises(ObjectiveRangeError):
            combined_objective(a, c, w)

    def test_argmax_weight_one(self):
        """With weight 1 the argmax equals the ADI2 argmax."""
        rng = random.Random(1)
        for _ in range(100):
            adi2_scores = [rng.random() for _ in range(10)]
            chrf_scores = [rng.random() for _ in range(10)]
            combined = [combined_objective(a, c, 1.0) for a, c in zip(adi2_scores, chrf_scores, strict=True)]
            assert combined.index(max(combined)) == adi2_scores.index(max(adi2_scores))


class TestDialectScorerProtocol:
    """Tests for the DialectScorer protocol."""

    def test_structural(self):
        """Any object with backend_id and score() is a scorer."""

        class Fixed:
            backend_id = "fixed"

            def score(self, text: str, target_dialect: str) -> DialectScore:
                return _score(1.0, 1.0, target_dialect)

        assert isinstance(Fixed(), DialectScorer)
