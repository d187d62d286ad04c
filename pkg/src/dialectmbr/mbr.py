"""Selection of the final output from a candidate set.

Reference-based utilities go through pairwise expected-utility MBR where the
candidate set doubles as pseudo-reference set (self comparison included).
Reference-free objectives rerank candidates by an independent score.  Ties
always break toward the lowest sampling index.
"""

import logging
from collections.abc import Callable, Iterable, Iterator, Sequence

from dialectmbr.exceptions import CandidateScoringError, MissingBackendError
from dialectmbr.metrics import ChrfUtility, DialectScorer, PreparedUtility, adi2, combined_objective
from dialectmbr.models.candidates import CandidateSet, SelectionResult
from dialectmbr.models.common import ObjectiveKind
from dialectmbr.models.metrics import ChrfConfig
from dialectmbr.utils import ordered_map

#: The module logger.
LOGGER = logging.getLogger(__name__)

#: Pairwise utility ``(hypothesis, pseudo_reference) -> float``.
PairwiseUtility = Callable[[str, str], float]
#: Reference-free candidate scorer ``text -> float``.
TextScorer = Callable[[str], float]


def _argmax(scores: Sequence[float]) -> int:
    best = 0
    for i, value in enumerate(scores):
        if value > scores[best]:
            best = i
    return best


def utility_matrix(texts: Sequence[str], utility: PairwiseUtility) -> list[list[float]]:
    """Utility of every candidate against every pseudo-reference.

    Utilities implementing :class:`~dialectmbr.metrics.PreparedUtility` are
    evaluated on cached per-text representations (one extraction per text).
    """
    if isinstance(utility, PreparedUtility):
        prepared = [utility.prepare(text) for text in texts]
        return [[utility.score_prepared(hyp, ref) for ref in prepared] for hyp in prepared]
    return [[utility(hyp, ref) for ref in texts] for hyp in texts]


def expected_utilities(texts: Sequence[str], utility: PairwiseUtility) -> list[float]:
    """Mean utility of each candidate over all candidates, summed in index order."""
    n = len(texts)
    return [sum(row) / n for row in utility_matrix(texts, utility)]


def _result(candidate_set: CandidateSet, scores: list[float], objective: ObjectiveKind) -> SelectionResult:
    chosen = _argmax(scores)
    LOGGER.debug("Prompt %s: chose candidate %d (%s)", candidate_set.prompt_id, chosen, objective.value)
    return SelectionResult(
        prompt_id=candidate_set.prompt_id,
        chosen_index=chosen,
        chosen_text=candidate_set.candidates[chosen].text,
        scores=scores,
        objective=objective,
    )


def mbr_select(
    candidate_set: CandidateSet, utility: PairwiseUtility, objective: ObjectiveKind = ObjectiveKind.CHRFPP
) -> SelectionResult:
    """Choose the candidate with the highest expected utility.

    Example:
        >>> exact = lambda h, r: float(h == r)
        >>> result = mbr_select(CandidateSet.from_texts("p", "s", ["aa", "aa", "bb"]), exact)
        >>> result.chosen_index, [round(s, 4) for s in result.scores]
        (0, [0.6667, 0.6667, 0.3333])
    """
    return _result(candidate_set, expected_utilities(candidate_set.texts, utility), objective)


def _independent_scores(candidate_set: CandidateSet, scorer: TextScorer) -> list[float]:
    scores = []
    for candidate in candidate_set.candidates:
        try:
            scores.append(float(scorer(candidate.text)))
        except Exception as e:
            LOGGER.error("Scoring candidate %d of %s failed: %s", candidate.index, candidate_set.prompt_id, e)
            raise CandidateScoringError(candidate_set.prompt_id, candidate.index, e) from e
    return scores


def rerank_select(
    candidate_set: CandidateSet, scorer: TextScorer, objective: ObjectiveKind = ObjectiveKind.ADI2
) -> SelectionResult:
    """Choose the candidate with the highest independent score.

    Raises:
        CandidateScoringError: If scoring any candidate fails.
    """
    return _result(candidate_set, _independent_scores(candidate_set, scorer), objective)


def first_select(candidate_set: CandidateSet) -> SelectionResult:
    """Standard decoding baseline: keep the first sample."""
    scores = [1.0] + [0.0] * (len(candidate_set) - 1)
    return _result(candidate_set, scores, ObjectiveKind.FIRST)


def adi2_text_scorer(scorer: DialectScorer, dialect: str) -> TextScorer:
    """Wrap a dialect scorer into a ``text -> ADI2`` function."""

    def score(text: str) -> float:
        return adi2(scorer.score(text, dialect))

    return score


def select_with_objective(
    candidate_set: CandidateSet,
    objective: ObjectiveKind,
    *,
    scorer: DialectScorer | None = None,
    dialect: str | None = None,
    chrf_config: ChrfConfig | None = None,
    combined_weight: float = 0.5,
) -> SelectionResult:
    """Select from ``candidate_set`` with the given decoding objective.

    Raises:
        MissingBackendError: If the objective needs a scorer or dialect that is not given.
    """
    match objective:
        case ObjectiveKind.FIRST:
            return first_select(candidate_set)
        case ObjectiveKind.CHRFPP:
            return mbr_select(candidate_set, ChrfUtility(chrf_config), ObjectiveKind.CHRFPP)

    if scorer is None or dialect is None:
        raise MissingBackendError(f"Objective {objective.value!r} requires a dialect scorer and a target dialect")
    text_scorer = adi2_text_scorer(scorer, dialect)
    if objective == ObjectiveKind.ADI2:
        return rerank_select(candidate_set, text_scorer, ObjectiveKind.ADI2)

    dialect_scores = _independent_scores(candidate_set, text_scorer)
    chrf_scores = expected_utilities(candidate_set.texts, ChrfUtility(chrf_config))
    scores = [
        combined_objective(dialect_score, chrf_score, combined_weight)
        for dialect_score, chrf_score in zip(dialect_scores, chrf_scores, strict=True)
    ]
    return _result(candidate_set, scores, ObjectiveKind.COMBINED)


def select_many(
    candidate_sets: Iterable[CandidateSet],
    objective: ObjectiveKind,
    *,
    scorer: DialectScorer | None = None,
    dialect: str | None = None,
    chrf_config: ChrfConfig | None = None,
    combined_weight: float = 0.5,
    jobs: int = 1,
) -> Iterator[SelectionResult]:
    """Select from many candidate sets in parallel, yielding results in input order."""

    def select(candidate_set: CandidateSet) -> SelectionResult:
        return select_with_objective(
            candidate_set,
            objective,
            scorer=scorer,
            dialect=dialect,
            chrf_config=chrf_config,
            combined_weight=combined_weight,
        )

    return ordered_map(select, candidate_sets, jobs)
