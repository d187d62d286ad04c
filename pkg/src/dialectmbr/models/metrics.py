"""Value objects for the metrics layer: chrF++ configuration, n-gram profiles
and dialect scores.
"""

from typing import Annotated, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ChrfConfig(BaseModel):
    """Parameters of chrF++.

    The defaults are the published chrF++ setting: character n-grams of
    orders 1 to 6, word n-grams of orders 1 and 2, and ``beta = 2``.
    """

    #: Maximal character n-gram order.
    max_char_n: Annotated[int, Field(ge=1)] = 6
    #: Maximal word n-gram order, 0 gives plain chrF.
    max_word_n: Annotated[int, Field(ge=0)] = 2
    #: Recall weight of the F-score.
    beta: Annotated[float, Field(gt=0.0)] = 2.0
    #: Whether whitespace is removed before extracting character n-grams.
    strip_whitespace: bool = True
    #: Value substituted for precision or recall of an order whose denominator is zero.
    epsilon_smoothing: Annotated[float, Field(ge=0.0)] = 1e-16

    model_config = ConfigDict(frozen=True)


class NGramProfile(BaseModel):
    """Character and word n-gram multisets of one text.

    Both maps are keyed by n-gram order.  Word n-grams are stored as their
    words joined by a single space.
    """

    #: Character n-gram counts by order ``1..max_char_n``.
    char_ngrams: Annotated[dict[int, dict[str, int]], Field(default_factory=dict)]
    #: Word n-gram counts by order ``1..max_word_n``.
    word_ngrams: Annotated[dict[int, dict[str, int]], Field(default_factory=dict)]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_counts(self) -> Self:
        for kind, table in (("char", self.char_ngrams), ("word", self.word_ngrams)):
            for order, counts in table.items():
                if order < 1:
                    raise ValueError(f"{kind} n-gram order must be positive, got {order}")
                if any(count < 1 for count in counts.values()):
                    raise ValueError(f"{kind} n-gram counts of order {order} must be positive")
        return self

    def is_empty(self) -> bool:
        """Whether the profile holds no n-gram at all."""
        return not any(self.char_ngrams.values()) and not any(self.word_ngrams.values())


class DialectScore(BaseModel):
    """Output of a dialect scorer for a single text.

    Example:
        >>> score = DialectScore(aldi=0.8, nadi_probs={"syr": 0.5}, target_dialect="syr")
        >>> score.target_probability
        0.5
    """

    #: Level of dialectness in ``[0, 1]``.
    aldi: Annotated[float, Field(ge=0.0, le=1.0)]
    #: Dialect identification probabilities by dialect label.
    nadi_probs: dict[str, Annotated[float, Field(ge=0.0, le=1.0)]]
    #: The dialect the text was requested in.
    target_dialect: str

    model_config = ConfigDict(frozen=True)

    @property
    def target_probability(self) -> float | None:
        """Probability of the target dialect, ``None`` if the scorer did not report it."""
        return self.nadi_probs.get(self.target_dialect)
