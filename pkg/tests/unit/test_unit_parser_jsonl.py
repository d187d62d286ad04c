"""Unit tests for the JSONL readers and writers."""

import json

import pytest

from dialectmbr import facade
from dialectmbr.exceptions import EmptyCandidatesError, MalformedJsonlError
from dialectmbr.models.candidates import CandidateSet, SelectionResult
from dialectmbr.models.common import ObjectiveKind
from dialectmbr.parser.jsonl import (
    is_candidates_file,
    iter_candidate_sets,
    iter_outputs,
    iter_prompts,
    iter_references,
    iter_selections,
)
from dialectmbr.writer.jsonl import CandidatesWriter, SelectionsWriter


def write_lines(path, *lines: str):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


class TestCandidates:
    """Tests for candidate files."""

    def test_round_trip(self, tmp_path):
        """Saved candidate sets load back unchanged, including Arabic text."""
        sets = [
            CandidateSet.from_texts("p1", "How are you?", ["كيفك؟", "شلونك؟"]),
            CandidateSet.from_texts("p2", "Thanks", ["شكرا"]),
        ]
        path = tmp_path / "candidates.jsonl"
        facade.save_candidates(sets, path)
        assert facade.load_candidates(path) == sets
        assert "كيفك" in path.read_text(encoding="utf-8")

    def test_indices_follow_file_order(self, tmp_path):
        """Candidate indices are the positions in the list."""
        record = json.dumps({"prompt_id": "p", "source": "s", "candidates": ["x", "y"]})
        path = write_lines(tmp_path / "c.jsonl", record)
        (cset,) = iter_candidate_sets(path)
        assert [(c.index, c.text) for c in cset.candidates] == [(0, "x"), (1, "y")]

    def test_blank_lines(self, tmp_path):
        """Blank lines are skipped, line numbers still count them."""
        record = json.dumps({"prompt_id": "p", "source": "s", "candidates": ["x"]})
        path = write_lines(tmp_path / "c.jsonl", record, "", "  ", "{broken")
        with pytest.raises(MalformedJsonlError) as exc_info:
            list(iter_candidate_sets(path))
        assert exc_info.value.line_no == 4
        assert str(exc_info.value).startswith(f"{path}:4:")

    def test_empty_candidates(self, tmp_path):
        """An empty candidate list is an error naming the line."""
        path = write_lines(
            tmp_path / "c.jsonl",
            json.dumps({"prompt_id": "p1", "source": "s", "candidates": ["x"]}),
            json.dumps({"prompt_id": "p2", "source": "s", "candidates": []}),
        )
        with pytest.raises(EmptyCandidatesError) as exc_info:
            list(iter_candidate_sets(path))
        assert exc_info.value.line_no == 2

    @pytest.mark.parametrize(
        "line",
        [
            '["not", "an", "object"]',
            '{"prompt_id": "p", "source": "s"}',
            '{"prompt_id": "p", "source": "s", "candidates": "x"}',
        ],
    )
    def test_malformed(self, tmp_path, line: str):
        """Non-objects and schema violations are reported with their line."""
        path = write_lines(tmp_path / "c.jsonl", line)
        with pytest.raises(MalformedJsonlError) as exc_info:
            list(iter_candidate_sets(path))
        assert exc_info.value.line_no == 1

    def test_writer_bytes(self):
        """One compact record per line."""
        data = CandidatesWriter().write_to_bytes([CandidateSet.from_texts("p", "s", ["a"])])
        assert data == b'{"prompt_id": "p", "source": "s", "candidates": ["a"]}\n'

    def test_is_candidates_file(self, tmp_path):
        """Candidate files are told apart from prompt files by their first record."""
        record = json.dumps({"prompt_id": "p", "source": "s", "candidates": []})
        candidates = write_lines(tmp_path / "c.jsonl", "", record)
        prompts = write_lines(tmp_path / "p.jsonl", json.dumps({"prompt_id": "p", "source": "s"}))
        empty = write_lines(tmp_path / "e.jsonl")
        assert is_candidates_file(candidates)
        assert not is_candidates_file(prompts)
        assert not is_candidates_file(empty)


class TestOtherRecords:
    """Tests for prompts, selections, outputs and references."""

    def test_prompts(self, tmp_path):
        """Prompts carry id and source."""
        path = write_lines(tmp_path / "p.jsonl", json.dumps({"prompt_id": "p1", "source": "Hello"}))
        assert [(p.prompt_id, p.source) for p in iter_prompts(path)] == [("p1", "Hello")]

    def test_selections_round_trip(self, tmp_path):
        """Selections load back unchanged."""
        selections = [
            SelectionResult(
                prompt_id="p1", chosen_index=1, chosen_text="b", scores=[0.25, 0.75], objective=ObjectiveKind.CHRFPP
            )
        ]
        path = tmp_path / "selections.jsonl"
        facade.save_selections(selections, path)
        assert list(iter_selections(path)) == selections
        assert json.loads(path.read_text(encoding="utf-8"))["objective"] == "chrf"

    def test_selections_writer_order(self):
        """Records are written in input order."""
        selections = [
            SelectionResult(prompt_id=f"p{i}", chosen_index=0, chosen_text="x", scores=[1.0], objective="first")
            for i in range(3)
        ]
        lines = SelectionsWriter().write_to_bytes(selections).decode("utf-8").splitlines()
        assert [json.loads(line)["prompt_id"] for line in lines] == ["p0", "p1", "p2"]

    def test_outputs(self, tmp_path):
        """Selections and plain output records are both accepted."""
        path = write_lines(
            tmp_path / "o.jsonl",
            json.dumps({"prompt_id": "p1", "chosen_text": "a", "chosen_index": 0}),
            json.dumps({"prompt_id": "p2", "output": "b"}),
        )
        assert [(r.prompt_id, r.text) for r in iter_outputs(path)] == [("p1", "a"), ("p2", "b")]

    def test_outputs_without_text(self, tmp_path):
        """An output record needs some text."""
        path = write_lines(tmp_path / "o.jsonl", json.dumps({"prompt_id": "p1"}))
        with pytest.raises(MalformedJsonlError):
            list(iter_outputs(path))

    def test_references(self, tmp_path):
        """The prompt id of a reference is optional."""
        path = write_lines(
            tmp_path / "r.jsonl", json.dumps({"reference": "x"}), json.dumps({"prompt_id": "p", "reference": "y"})
        )
        assert [(r.prompt_id, r.reference) for r in iter_references(path)] == [(None, "x"), ("p", "y")]

    def test_atomic_write_failure(self, tmp_path):
        """A failing record stream leaves no output and no temporary file behind."""

        def broken():
            yield CandidateSet.from_texts("p", "s", ["a"])
            raise RuntimeError("interrupted")

        path = tmp_path / "c.jsonl"
        with pytest.raises(RuntimeError):
            CandidatesWriter().write_to_file(broken(), path)
        assert list(tmp_path.iterdir()) == []
