import csv
import io
import json
import shutil
from pathlib import Path

import pytest

from clintime.cli import main
from clintime.corpus import (
    AnnotatedDocument, Document, EventMention, Span, TimexMention, TLink, read_standoff, write_standoff,
)
from clintime.errors import ConfigError
from clintime.pipeline import load_config
from clintime.timeline import build_timeline

DATA = Path(__file__).parent / "data"


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["tag", "--input", "x"]) == 1
    assert main(["eval", "--gold", "g", "--system", "s", "--tlink-subset", "other"]) == 1
    assert main(["tag", "--input", "x", "--output", "y", "--workers", "0"]) == 1


def test_gen_synthetic_layout(synthetic_dir):
    gold = sorted(p.stem for p in (synthetic_dir / "gold").glob("*.ann"))
    text = sorted(p.stem for p in (synthetic_dir / "text").glob("*.txt"))
    assert len(gold) == 16 and gold == text


def test_train_empty_corpus_exit_2(tmp_path, capsys):
    (tmp_path / "corpus").mkdir()
    assert main(["train", "--corpus", str(tmp_path / "corpus"), "--out", str(tmp_path / "m")]) == 2
    assert "no training documents" in capsys.readouterr().err


def test_missing_input_dir_exit_2(tmp_path, models_dir):
    code = main(["tag", "--models", str(models_dir), "--input", str(tmp_path / "nope"), "--output", str(tmp_path)])
    assert code == 2


def test_retrain_is_byte_identical(synthetic_dir, models_dir, tmp_path):
    assert main(["train", "--corpus", str(synthetic_dir / "gold"), "--out", str(tmp_path)]) == 0
    for p in sorted(models_dir.glob("*.json")):
        assert (tmp_path / p.name).read_bytes() == p.read_bytes()


def test_schema_labels(models_dir, synthetic_dir, tmp_path):
    labels = json.loads((models_dir / "event-Test.json").read_text())["labels"]
    assert set(labels) == {"W", "B", "I", "O"}
    assert set(json.loads((models_dir / "event-Problem.json").read_text())["labels"]) == {"B", "I", "O"}
    code = main(["train", "--corpus", str(synthetic_dir / "gold"), "--out", str(tmp_path), "--schema-problem", "IO",
                 "--no-ter-ml"])
    assert code == 0
    assert set(json.loads((tmp_path / "event-Problem.json").read_text())["labels"]) == {"I", "O"}
    assert not (tmp_path / "ter.json").exists()


def test_tag_empty_dir(models_dir, tmp_path):
    (tmp_path / "in").mkdir()
    assert main(["tag", "--models", str(models_dir), "--input", str(tmp_path / "in"),
                 "--output", str(tmp_path / "out")]) == 0
    assert list((tmp_path / "out").iterdir()) == []


def test_malformed_document_is_quarantined(synthetic_dir, models_dir, tmp_path):
    good = sorted((synthetic_dir / "gold").glob("*.ann"))[:2]
    alone, mixed = tmp_path / "alone", tmp_path / "mixed"
    alone.mkdir()
    mixed.mkdir()
    for p in good:
        shutil.copy(p, alone)
        shutil.copy(p, mixed)
    (mixed / "broken.ann").write_text("#DOC broken\n#TEXT 1\nshort\nE1\tEVENT\tProblem\t0\t99\tfalse\tx\n")
    for d in (alone, mixed):
        assert main(["tag", "--models", str(models_dir), "--input", str(d), "--output", str(d / "out")]) == 0
    log = (mixed / "out" / "errors.log").read_text()
    assert log.startswith("broken\t")
    assert not (mixed / "out" / "broken.ann").exists()
    for p in good:
        assert (mixed / "out" / p.name).read_bytes() == (alone / "out" / p.name).read_bytes()


def test_sample_narrative_golden(models_dir, tmp_path):
    assert main(["tag", "--models", str(models_dir), "--input", str(DATA / "sample"), "--output", str(tmp_path)]) == 0
    got = (tmp_path / "sample_note.ann").read_text()
    assert got == (DATA / "sample_note.golden.ann").read_text()
    adoc = read_standoff(tmp_path / "sample_note.ann")
    assert adoc.events and adoc.timexes and adoc.tlinks


def test_eval_gold_against_itself(synthetic_dir, tmp_path, capsys):
    gold = str(synthetic_dir / "gold")
    assert main(["eval", "--gold", gold, "--system", gold, "--out", str(tmp_path)]) == 0
    tsv = dict(line.split("\t") for line in (tmp_path / "report.tsv").read_text().splitlines())
    for key in ("event.micro.strict.f1", "timex.primary_score", "tlink.customary.f1", "tlink.tempeval3.f1"):
        assert float(tsv[key]) == 1.0
    assert (tmp_path / "scores.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert main(["eval", "--gold", gold, "--system", gold, "--tlink-subset", "sectime", "--out", str(tmp_path),
                 "--no-figures"]) == 0
    assert "tlink.subset\tsectime" in (tmp_path / "report.tsv").read_text()


def test_eval_threshold_and_mismatch(synthetic_dir, tmp_path):
    gold = synthetic_dir / "gold"
    sys_dir = tmp_path / "sys"
    sys_dir.mkdir()
    first = sorted(gold.glob("*.ann"))[0]
    adoc = read_standoff(first)
    write_standoff(adoc.with_annotations(events=(), tlinks=()), sys_dir / first.name)
    assert main(["eval", "--gold", str(gold), "--system", str(sys_dir), "--min-event-f1", "0.5"]) == 3
    assert main(["eval", "--gold", str(gold), "--system", str(sys_dir), "--min-event-f1", "0.0"]) == 0
    write_standoff(adoc.with_annotations(), sys_dir / "extra.ann")
    assert main(["eval", "--gold", str(gold), "--system", str(sys_dir)]) == 2


def _timeline_doc(links, meta=None):
    text = "fever then cough then rash on 2012-03-09."
    events = (EventMention("E1", Span(0, 5), "Problem"), EventMention("E2", Span(11, 16), "Problem"),
              EventMention("E3", Span(22, 26), "Problem"))
    timexes = (TimexMention("T1", Span(30, 40), "Date", "2012-03-09"),)
    return AnnotatedDocument(Document("tl", text, meta if meta is not None else {"dct": "2012-03-10"}), (),
                             events, timexes, tuple(TLink(f"L{i}", *l) for i, l in enumerate(links, 1)))


def test_timeline_ordering():
    rows = build_timeline(_timeline_doc([("E1", "ST-DCT", "Before", "Sectime"),
                                         ("E3", "T1", "Overlap", "Prepositional")]))
    assert [r.anchor_id for r in rows] == ["E3", "E1", "E2"]
    assert rows[0].resolved_date == "2012-03-09"
    assert rows[1].relation_to_dct == "Before"
    assert rows[2].relation_to_dct == "Unknown" and rows[2].sort_date is None


def test_timeline_without_temporal_info():
    rows = build_timeline(_timeline_doc([], meta={}))
    assert [r.anchor_id for r in rows] == ["E1", "E2", "E3"]
    assert {r.relation_to_dct for r in rows} == {"Unknown"}


def test_timeline_conflict_keeps_document_order():
    rows = build_timeline(_timeline_doc([("E1", "E2", "Before", "Other"), ("E2", "E1", "Before", "Other"),
                                         ("E3", "T1", "Overlap", "Prepositional")]))
    assert [r.anchor_id for r in rows] == ["E3", "E1", "E2"]
    assert rows[1].note == rows[2].note == "conflicting links"


def test_timeline_command(tmp_path, capsys):
    path = tmp_path / "tl.ann"
    write_standoff(_timeline_doc([("E3", "T1", "Overlap", "Prepositional")]), path)
    assert main(["timeline", "--input", str(path), "--out", str(tmp_path / "tl.csv"),
                 "--figure", str(tmp_path / "tl.png")]) == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "tl.csv").read_text())))
    assert rows[0]["anchor_id"] == "E3" and rows[0]["resolved_date"] == "2012-03-09"
    assert (tmp_path / "tl.png").stat().st_size > 0
    assert main(["timeline", "--input", str(path)]) == 0
    assert capsys.readouterr().out.startswith("anchor_id,surface")


# --- configuration ------------------------------------------------------------


def test_config_include_and_override(tmp_path):
    (tmp_path / "base.cfg").write_text("closure = yes\nschema.Test = BIO\nmax_iter = 5\n")
    (tmp_path / "run.cfg").write_text("include = base.cfg\nmax_iter = 7  # later keys win\nmodels_dir = m\n")
    cfg = load_config(tmp_path / "run.cfg")
    assert cfg.flag("closure") and cfg.schemas["Test"] == "BIO" and cfg.max_iter == 7
    assert cfg.path("models_dir") == tmp_path / "m"


@pytest.mark.parametrize("body, needle", [
    ("nonsense = 1\n", "unknown key"),
    ("closure = maybe\n", "boolean"),
    ("schema.Test = BILOU\n", "schema"),
    ("schema.Organ = BIO\n", "category"),
    ("max_iter = many\n", "int"),
    ("workers = 0\n", "at least 1"),
    ("ter_rules = missing.tsv\n", "does not exist"),
    ("just a line\n", "key = value"),
    ("include = self.cfg\n", "cycle"),
])
def test_config_errors(tmp_path, body, needle):
    path = tmp_path / "self.cfg"
    path.write_text(body)
    with pytest.raises(ConfigError, match=needle):
        load_config(path)


def test_config_error_exit_2(tmp_path, capsys):
    (tmp_path / "bad.cfg").write_text("bogus = 1\n")
    assert main(["tag", "--config", str(tmp_path / "bad.cfg"), "--input", str(tmp_path),
                 "--output", str(tmp_path / "o")]) == 2
    assert "bad.cfg:1" in capsys.readouterr().err
