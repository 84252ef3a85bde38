import json
import os

import pytest

from crforge import cli, pipeline
from crforge.drawing import seed_k4, to_text, write_file
from crforge.pipeline import (StageRun, run_k12_compound, run_stage,
                              stats_table, verify_file)


@pytest.fixture(scope="module")
def chain(tmp_path_factory, d5, d6, d7, d8):
    root = tmp_path_factory.mktemp("chain")
    files = {}
    for name, pool in (("d4", [seed_k4()]), ("d5", d5), ("d6", d6),
                       ("d7", d7), ("d8", d8)):
        files[name] = str(root / f"{name}.txt")
        write_file(files[name], pool)
    files["root"] = str(root)
    return files


def test_run_stage_matches_fixture(chain, tmp_path, d8):
    from crforge import canonical
    from crforge.drawing import load_file, validate
    run = run_stage(8, 20, chain["d7"], tmp_path / "out.txt")
    assert run.drawings_out == 109
    assert run.histogram == {18: 3, 19: 18, 20: 88}
    assert not run.anomalies and not run.input_errors
    # records are canonical representatives of exactly the fixture classes
    written = load_file(tmp_path / "out.txt")
    assert all(validate(d).ok for d in written)
    assert ({canonical.canonical_code(d) for d in written}
            == {canonical.canonical_code(d) for d in d8})
    assert os.path.exists(tmp_path / "out.txt.codes")
    loaded = StageRun.load(str(tmp_path / "out.txt.stats.json"))
    assert loaded.histogram == run.histogram


def test_shard_and_worker_independence(chain, tmp_path):
    whole = run_stage(8, 20, chain["d7"], tmp_path / "whole.txt", workers=2)
    parts = set()
    for i in range(3):
        run_stage(8, 20, chain["d7"], tmp_path / f"s{i}.txt", shard=(i, 3))
        with open(tmp_path / f"s{i}.txt.codes") as fh:
            parts |= {ln.strip() for ln in fh}
    with open(tmp_path / "whole.txt.codes") as fh:
        assert parts == {ln.strip() for ln in fh}
    assert whole.drawings_out == 109


def test_checkpoint_resume(chain, tmp_path):
    ck = tmp_path / "ck.json"
    partial = run_stage(8, 20, chain["d7"], tmp_path / "p.txt",
                        checkpoint=ck, stop_after=2)
    assert any("stopped after 2" in n for n in partial.notes)
    state = json.loads(ck.read_text())
    assert state["done"] == 2
    resumed = run_stage(8, 20, chain["d7"], tmp_path / "r.txt",
                        checkpoint=ck, resume=True)
    once = run_stage(8, 20, chain["d7"], tmp_path / "o.txt")
    assert (tmp_path / "r.txt").read_text() == (tmp_path / "o.txt").read_text()
    assert resumed.drawings_out == once.drawings_out == 109


def test_alg2_stage(chain, tmp_path):
    run = run_stage(7, 9, chain["d6"], tmp_path / "rep7.txt", mode="alg2")
    assert run.drawings_out > 0
    assert not run.error_lines
    report = verify_file(tmp_path / "rep7.txt")
    assert report.ok


def test_invalid_records_listed(tmp_path, d5):
    path = tmp_path / "bad.txt"
    path.write_text(to_text(d5[0]) + "D n=5\n.\n", encoding="ascii")
    run = run_stage(6, 3, path, tmp_path / "out.txt")
    assert len(run.input_errors) == 1
    assert run.drawings_in == 1


def test_verify_golden_k8(chain):
    report = verify_file(chain["d8"])
    assert report.records == 109
    assert report.ok and not report.anomalies


def test_shipped_optimal_k8_file(d8):
    from crforge import canonical
    from crforge.drawing import load_file
    path = os.path.join(os.path.dirname(__file__), "data", "d8_18.txt")
    report = verify_file(path)
    assert report.ok and report.records == 3
    shipped = {canonical.canonical_code(d) for d in load_file(path)}
    fresh = {canonical.canonical_code(d) for d in d8 if d.x == 18}
    assert shipped == fresh


def test_verify_catches_corruption(chain, tmp_path, d8):
    text = to_text(d8[0])
    lines = text.splitlines()
    idx = next(i for i, ln in enumerate(lines) if ln.startswith("H 4 "))
    parts = lines[idx].split()
    parts[2] = "twin=4"
    lines[idx] = " ".join(parts)
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines) + "\n", encoding="ascii")
    report = verify_file(bad)
    assert not report.ok
    assert any("involution" in f or "twin" in f for f in report.failures)


def test_verify_parity_wiring(chain, monkeypatch):
    monkeypatch.setattr(pipeline.counting, "parity_ok", lambda n, c: False)
    report = verify_file(chain["d7"])
    assert report.ok  # parity disagreement is an anomaly, not a failure
    assert len(report.anomalies) == 5


def test_verify_ndp_flag(chain):
    report = verify_file(chain["d8"], ndp=True)
    assert report.ok and not report.anomalies


def test_stats_table_rows(chain, tmp_path):
    run = run_stage(8, 20, chain["d7"], tmp_path / "o.txt")
    table = stats_table([run])
    assert "D_8^18" in table and "D_8^19" in table and "D_8^20" in table
    for row, count in (("D_8^18", 3), ("D_8^19", 18), ("D_8^20", 88)):
        line = next(ln for ln in table.splitlines() if ln.startswith(row + " "))
        assert str(count) in line.split()
    assert stats_table([]).count("\n") == 1  # header only


def test_stats_figures(chain, tmp_path):
    run = run_stage(8, 20, chain["d7"], tmp_path / "o.txt")
    from crforge.report import render_stats_figures
    written = render_stats_figures([run], tmp_path / "figs")
    assert [os.path.basename(p) for p in written] == ["counts.png", "times.png"]
    for p in written:
        assert os.path.getsize(p) > 1000


def test_k12_compound_analogue(chain, tmp_path):
    report = run_k12_compound(chain["d6"], tmp_path / "rep.txt",
                              extend_cr=9, target_x=19, threshold=12)
    assert report.bases == 1
    assert report.extensions > 0
    assert report.hits == 0
    assert not report.anomalies and not report.error_lines
    text = (tmp_path / "rep.txt").read_text()
    assert "no extension with 19 crossings" in text
    assert "V k11=" in text


def test_k12_compound_hits_are_reported(chain):
    report = run_k12_compound(chain["d6"], None,
                              extend_cr=9, target_x=19, threshold=10)
    assert report.hits > 0
    line = report.hit_lines[0]
    for token in ("HIT base=", " F=", " F'=", " F''=", " v=", " cr=",
                  " classes="):
        assert token in line


def test_cli_generate_and_verify(chain, tmp_path, capsys):
    out = tmp_path / "d8cli.txt"
    rc = cli.main(["generate", "--from", chain["d7"], "--n", "8",
                   "--max-cr", "20", "--out", str(out)])
    assert rc == 0
    assert cli.main(["verify", str(out)]) == 0
    assert cli.main(["canon", chain["d5"]]) == 0
    capsys.readouterr()


def test_cli_exit_codes(tmp_path, capsys, d5):
    bad = tmp_path / "bad.txt"
    bad.write_text("D n=5\n.\n", encoding="ascii")
    out = tmp_path / "o.txt"
    rc = cli.main(["generate", "--from", str(bad), "--n", "6",
                   "--max-cr", "3", "--out", str(out)])
    assert rc == 1
    capsys.readouterr()


def test_cli_plan_and_stats(chain, tmp_path, capsys):
    assert cli.main(["plan", "--target-n", "13", "--target-cr", "217"]) == 0
    text = capsys.readouterr().out
    assert "D_12^151" in text
    run_stage(8, 20, chain["d7"], tmp_path / "o.txt")
    rc = cli.main(["stats", str(tmp_path), "--out-dir", str(tmp_path / "rep")])
    assert rc == 0
    assert (tmp_path / "rep" / "stats.tsv").exists()
    assert (tmp_path / "rep" / "counts.png").exists()
    capsys.readouterr()


def test_cli_k12check_analogue(chain, tmp_path, capsys):
    rc = cli.main(["k12check", "--k10", chain["d6"],
                   "--report", str(tmp_path / "rep.txt"),
                   "--extend-cr", "9", "--target-cr", "19",
                   "--threshold", "12"])
    assert rc == 0
    assert (tmp_path / "rep.txt").exists()
    capsys.readouterr()


def test_stage_run_json_roundtrip(chain, tmp_path):
    run = run_stage(6, 3, chain["d5"], tmp_path / "o.txt")
    again = StageRun.from_json(run.to_json())
    assert again == run
