"""chrF++, the ADI2 dialect fidelity score and the combined decoding objective.

chrF++ is split into profile extraction and profile comparison so that
callers scoring many pairs over the same texts (MBR) extract each text once.
All functions are pure and safe to call from any number of threads.
"""

from collections import Counter
from collections.abc import Iterable, Sequence
from typing import Protocol, runtime_checkable

from dialectmbr.exceptions import EmptyCorpusError, ObjectiveRangeError, ScorerMismatchError
from dialectmbr.models.metrics import ChrfConfig, DialectScore, NGramProfile


#: Per-order statistics ``(hypothesis total, reference total, matches)``.
OrderStatistics = tuple[int, int, int]


@runtime_checkable
class DialectScorer(Protocol):
    """Backend producing ALDI / NADI outputs for a text.

    Implementations must be safe for concurrent calls.
    """

    @property
    def backend_id(self) -> str:
        """Stable identifier recorded in report fingerprints."""
        ...  # pragma: no cover

    def score(self, text: str, target_dialect: str) -> DialectScore:
        """Score ``text`` against ``target_dialect``."""
        ...  # pragma: no cover


@runtime_checkable
class PreparedUtility[P](Protocol):
    """Pairwise utility that can cache a per-text representation."""

    def prepare(self, text: str) -> P:
        """Compute the cached representation of ``text``."""
        ...  # pragma: no cover

    def score_prepared(self, hypothesis: P, reference: P) -> float:
        """Score two prepared texts."""
        ...  # pragma: no cover


def _count_ngrams(units: Sequence[str], n: int, joiner: str) -> dict[str, int]:
    return dict(Counter(joiner.join(units[i : i + n]) for i in range(len(units) - n + 1)))


def extract_profile(text: str, config: ChrfConfig | None = None) -> NGramProfile:
    """Extract the character and word n-gram multisets of ``text``.

    Example:
        >>> profile = extract_profile("aa")
        >>> profile.char_ngrams[1], profile.char_ngrams[2], profile.word_ngrams[1]
        ({'a': 2}, {'aa': 1}, {'aa': 1})
    """
    config = config or ChrfConfig()
    chars = list("".join(text.split()) if config.strip_whitespace else text)
    words = text.split()
    char_ngrams = {}
    for n in range(1, config.max_char_n + 1):
        counts = _count_ngrams(chars, n, "")
        if counts:
            char_ngrams[n] = counts
    word_ngrams = {}
    for n in range(1, config.max_word_n + 1):
        counts = _count_ngrams(words, n, " ")
        if counts:
            word_ngrams[n] = counts
    return NGramProfile(char_ngrams=char_ngrams, word_ngrams=word_ngrams)


def _match_count(hyp: dict[str, int], ref: dict[str, int]) -> int:
    if len(hyp) > len(ref):
        hyp, ref = ref, hyp
    return sum(min(count, ref.get(gram, 0)) for gram, count in hyp.items())


def order_statistics(hypothesis: NGramProfile, reference: NGramProfile, config: ChrfConfig) -> list[OrderStatistics]:
    """Clipped n-gram statistics for every order, character orders first."""
    result: list[OrderStatistics] = []
    for hyp_table, ref_table, max_n in (
        (hypothesis.char_ngrams, reference.char_ngrams, config.max_char_n),
        (hypothesis.word_ngrams, reference.word_ngrams, config.max_word_n),
    ):
        for n in range(1, max_n + 1):
            hyp = hyp_table.get(n, {})
            ref = ref_table.get(n, {})
            result.append((sum(hyp.values()), sum(ref.values()), _match_count(hyp, ref)))
    return result


def fscore_from_statistics(statistics: Iterable[OrderStatistics], config: ChrfConfig) -> float:
    """Average the per-order F-scores of the given statistics.

    Orders to which neither side contributes an n-gram are not comparable
    and do not enter the average.  An order with a zero denominator on one
    side uses epsilon smoothing for the undefined precision or recall.
    Without any comparable order the score is 0.
    """
    eps = config.epsilon_smoothing
    factor = config.beta**2
    total = 0.0
    effective_orders = 0
    for n_hyp, n_ref, n_match in statistics:
        if n_hyp == 0 and n_ref == 0:
            continue
        effective_orders += 1
        precision = n_match / n_hyp if n_hyp > 0 else eps
        recall = n_match / n_ref if n_ref > 0 else eps
        denom = factor * precision + recall
        if denom > 0:
            total += (1 + factor) * precision * recall / denom
    if effective_orders == 0:
        return 0.0
    return total / effective_orders


def chrfpp_from_profiles(hypothesis: NGramProfile, reference: NGramProfile, config: ChrfConfig | None = None) -> float:
    """Sentence-level chrF++ of two precomputed profiles."""
    config = config or ChrfConfig()
    return fscore_from_statistics(order_statistics(hypothesis, reference, config), config)


def chrfpp_sentence(hypothesis: str, reference: str, config: ChrfConfig | None = None) -> float:
    """Sentence-level chrF++ in ``[0, 1]``.

    Identical strings score 1.0, except whitespace-only ones: with whitespace
    stripped they yield no n-gram at all, so no order is comparable and the
    score is 0.0 like for empty strings.

    Example:
        >>> chrfpp_sentence("cat", "cat")
        1.0
        >>> chrfpp_sentence("", "cat")
        0.0
        >>> chrfpp_sentence(" ", " ")
        0.0
    """
    config = config or ChrfConfig()
    return chrfpp_from_profiles(extract_profile(hypothesis, config), extract_profile(reference, config), config)


def chrfpp_corpus(pairs: Iterable[tuple[str, str]], config: ChrfConfig | None = None) -> float:
    """Corpus-level chrF++ from n-gram statistics summed over all pairs.

    Raises:
        EmptyCorpusError: If ``pairs`` is empty.
    """
    config = config or ChrfConfig()
    sums: list[list[int]] | None = None
    for hypothesis, reference in pairs:
        stats = order_statistics(extract_profile(hypothesis, config), extract_profile(reference, config), config)
        if sums is None:
            sums = [list(order) for order in stats]
        else:
            for acc, order in zip(sums, stats, strict=True):
                for i in range(3):
                    acc[i] += order[i]
    if sums is None:
        raise EmptyCorpusError("chrF++ corpus score requires at least one segment pair")
    return fscore_from_statistics([(h, r, m) for h, r, m in sums], config)


def adi2(score: DialectScore) -> float:
    """ADI2 dialect fidelity: dialectness times the probability of the target dialect.

    Example:
        >>> adi2(DialectScore(aldi=0.8, nadi_probs={"syr": 0.5}, target_dialect="syr"))
        0.4

    Raises:
        ScorerMismatchError: If the scorer did not report the target dialect.
    """
    probability = score.target_probability
    if probability is None:
        raise ScorerMismatchError(
            f"Target dialect {score.target_dialect!r} missing from scorer output "
            f"(reported: {sorted(score.nadi_probs)}); scorer and configuration disagree"
        )
    return score.aldi * probability


def combined_objective(adi2_score: float, chrf_component: float, weight: float = 0.5) -> float:
    """Convex combination ``weight * adi2 + (1 - weight) * chrf``.

    Example:
        >>> combined_objective(0.4, 0.6)
        0.5

    Raises:
        ObjectiveRangeError: If an input or the weight is outside of ``[0, 1]``.
    """
    for name, value in (("weight", weight), ("adi2_score", adi2_score), ("chrf_component", chrf_component)):
        if not 0.0 <= value <= 1.0:
            raise ObjectiveRangeError(f"{name} must be in [0, 1], got {value}")
    return weight * adi2_score + (1.0 - weight) * chrf_component


class ChrfUtility:
    """chrF++ as a pairwise MBR utility.

    Calling the utility scores two strings directly; :meth:`prepare` and
    :meth:`score_prepared` are the cached path used for utility matrices.
    Both paths give bit-identical scores.
    """

    def __init__(self, config: ChrfConfig | None = None) -> None:
        self.config = config or ChrfConfig()

    def __call__(self, hypothesis: str, reference: str) -> float:
        return chrfpp_sentence(hypothesis, reference, self.config)

    def prepare(self, text: str) -> NGramProfile:
        return extract_profile(text, self.config)

    def score_prepared(self, hypothesis: NGramProfile, reference: NGramProfile) -> float:
        return chrfpp_from_profiles(hypothesis, reference, self.config)
