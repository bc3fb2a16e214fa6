import json

import pytest

from mpda import formats
from mpda.cli import main
from mpda.gadgets import anbncn
from mpda.model import Witness, replay
from mpda.regsets import member, singleton


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    record = None
    stream = out.out if code != 3 else out.err
    first = stream.splitlines()[0] if stream else ""
    if first.startswith("{"):
        record = json.loads(first)
    return code, record, out


@pytest.fixture
def workdir(tmp_path, capsys):
    code, record, _ = run(capsys, "gen", "anbncn", "--out", str(tmp_path))
    assert code == 0 and record["family"] == "anbncn"
    return tmp_path


class TestGen:
    def test_writes_the_three_files(self, workdir):
        for name in ("machine.mpda", "source.cfg", "target.regset"):
            assert (workdir / name).exists()
        m = formats.parse_mpda((workdir / "machine.mpda").read_text())
        assert len(m.rules) == 5
        src = formats.parse_configuration((workdir / "source.cfg").read_text().strip(), m)
        assert src == anbncn().source

    def test_expo_and_bad_family(self, tmp_path, capsys):
        code, record, _ = run(capsys, "gen", "expo:3", "--out", str(tmp_path / "e"))
        assert code == 0 and record["family"] == "expo:3"
        code, record, _ = run(capsys, "gen", "no-such-family", "--out", str(tmp_path / "x"))
        assert code == 3 and "unknown family" in record["error"]

    def test_comm_free_spec(self, tmp_path, capsys):
        spec = tmp_path / "counters.txt"
        spec.write_text("source: 2 0\ntarget: 0 2\nrule 1 : 0 1\n")
        code, record, _ = run(capsys, "gen", "comm-free", "--out", str(tmp_path / "c"), "--spec", str(spec))
        assert code == 0
        code, _, _ = run(
            capsys, "reach", str(tmp_path / "c" / "machine.mpda"),
            "--from", (tmp_path / "c" / "source.cfg").read_text().strip(),
            "--to", "@" + str(tmp_path / "c" / "target.regset"),
            "--method", "oracle",
        )
        assert code == 0


class TestClassify:
    def test_record(self, workdir, capsys):
        code, record, _ = run(capsys, "classify", str(workdir / "machine.mpda"))
        assert code == 0
        assert record["weak"] is True
        assert record["state_order"] == ["q1", "q2"]
        assert record["strongly_normed"] is False
        assert record["normed"] is False

    def test_missing_file(self, capsys):
        code, record, _ = run(capsys, "classify", "/no/such/machine.mpda")
        assert code == 3 and "cannot read" in record["error"]


class TestReach:
    def test_reachable_with_witness_file(self, workdir, capsys):
        wfile = workdir / "run.witness"
        code, record, _ = run(
            capsys, "reach", str(workdir / "machine.mpda"),
            "--from", "q1 : X D |",
            "--to", "@" + str(workdir / "target.regset"),
            "--method", "oracle", "--witness", str(wfile),
        )
        assert code == 0 and record["status"] == "reachable"
        m = formats.parse_mpda((workdir / "machine.mpda").read_text())
        w = formats.parse_witness(wfile.read_text(), m)
        assert len(w.steps) == record["witness_length"]
        tgt = formats.parse_regset((workdir / "target.regset").read_text(), m)
        assert member(tgt, replay(m, w))

    def test_unreachable_exit_1(self, workdir, capsys):
        code, record, _ = run(
            capsys, "reach", str(workdir / "machine.mpda"),
            "--from", "q1 : X D |", "--to", "q2 : X |",
            "--method", "oracle", "--max-size", "6",
        )
        assert code == 1 and record["status"] == "unreachable"

    def test_budget_exit_2(self, tmp_path, capsys):
        run(capsys, "gen", "expo:5", "--out", str(tmp_path))
        code, record, _ = run(
            capsys, "reach", str(tmp_path / "machine.mpda"),
            "--from", "q : X1", "--to", "q : X5",
            "--method", "oracle", "--max-size", "40", "--max-explored", "3",
        )
        assert code == 2 and record["status"] == "unknown"

    def test_auto_picks_wqo_for_config_target(self, workdir, capsys):
        code, record, _ = run(
            capsys, "reach", str(workdir / "machine.mpda"),
            "--from", "q1 : X D |", "--to", "q2 : |",
        )
        assert code == 0 and record["method"] == "wqo"

    def test_auto_picks_marked_when_strongly_normed(self, tmp_path, capsys):
        run(capsys, "gen", "expo:3", "--out", str(tmp_path))
        code, record, _ = run(
            capsys, "reach", str(tmp_path / "machine.mpda"),
            "--from", "q : X1", "--to", "q : X3",
        )
        assert code == 0 and record["method"] == "marked"

    def test_bad_configuration_literal(self, workdir, capsys):
        code, record, _ = run(
            capsys, "reach", str(workdir / "machine.mpda"),
            "--from", "q1 : NOPE |", "--to", "q2 : |",
        )
        assert code == 3


class TestRegsetOps:
    def test_member_and_enumerate(self, workdir, capsys):
        mfile = str(workdir / "machine.mpda")
        tfile = str(workdir / "target.regset")
        code, record, _ = run(capsys, "regset", mfile, "member", tfile, "q2 : |")
        assert code == 0 and record["member"] is True
        code, record, _ = run(capsys, "regset", mfile, "member", tfile, "q1 : X |")
        assert code == 0 and record["member"] is False
        code, record, _ = run(capsys, "regset", mfile, "enumerate", tfile, "3")
        assert code == 0 and record["members"] == ["q2 :  | "]

    def test_union_round_trip(self, workdir, capsys):
        m = formats.parse_mpda((workdir / "machine.mpda").read_text())
        other = workdir / "other.regset"
        other.write_text(formats.serialize_regset(singleton(m, formats.parse_configuration("q1 : X |", m))))
        out = workdir / "u.regset"
        code, record, _ = run(
            capsys, "regset", str(workdir / "machine.mpda"), "union",
            str(workdir / "target.regset"), str(other), "--out", str(out),
        )
        assert code == 0
        u = formats.parse_regset(out.read_text(), m)
        assert member(u, formats.parse_configuration("q1 : X |", m))
        assert member(u, formats.parse_configuration("q2 : |", m))

    def test_complement_budget_error(self, workdir, capsys):
        code, record, _ = run(
            capsys, "regset", str(workdir / "machine.mpda"), "complement",
            str(workdir / "target.regset"), "--budget", "1",
        )
        assert code == 3

    def test_is_empty_and_subset(self, workdir, capsys):
        mfile = str(workdir / "machine.mpda")
        tfile = str(workdir / "target.regset")
        code, record, _ = run(capsys, "regset", mfile, "is-empty", tfile)
        assert code == 0 and record["empty"] is False
        code, record, _ = run(capsys, "regset", mfile, "is-subset", tfile, tfile)
        assert code == 0 and record["subset"] is True


class TestPreAndShrink:
    def test_pre_writes_parseable_set(self, workdir, capsys):
        out = workdir / "pre.regset"
        code, record, _ = run(
            capsys, "pre", str(workdir / "machine.mpda"), str(workdir / "target.regset"),
            "--out", str(out),
        )
        assert code == 0
        m = formats.parse_mpda((workdir / "machine.mpda").read_text())
        P = formats.parse_regset(out.read_text(), m)
        assert member(P, formats.parse_configuration("q1 : D |", m))
        assert not member(P, formats.parse_configuration("q1 : X D |", m))

    def test_shrink(self, workdir, capsys):
        m = formats.parse_mpda((workdir / "machine.mpda").read_text())
        start = formats.parse_configuration("q1 : X D |", m)
        w = Witness(start, (m.rules[1], m.rules[3]))
        wfile = workdir / "w.witness"
        wfile.write_text(formats.serialize_witness(w))
        # the source must stay inside the given set; a singleton pins it
        sfile = workdir / "src.regset"
        sfile.write_text(formats.serialize_regset(singleton(m, start)))
        code, record, _ = run(
            capsys, "shrink", str(workdir / "machine.mpda"),
            "--witness", str(wfile), "--set", str(sfile),
        )
        assert code == 0
        assert record["before"] == "q1 : X D | "
        assert record["removed"] == 0
