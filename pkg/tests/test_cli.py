import json

import pytest

from corpusforge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def data_dir(tmp_path):
    return str(tmp_path / "data")


@pytest.fixture
def provisioned(data_dir, capsys):
    for name, role, uid in [("Ada", "admin", "admin"), ("Tess", "translator", "t1"),
                            ("Rio", "reviewer", "r1")]:
        code, _, _ = run(capsys, "--data-dir", data_dir, "users", "create",
                         "--name", name, "--role", role, "--id", uid,
                         "--credential", f"{uid}-cred")
        assert code == 0
    return data_dir


def write_import_file(path, lines):
    path.write_text("".join(json.dumps({"en": line}) + "\n" for line in lines), encoding="utf-8")
    return str(path)


class TestUsers:
    def test_create_prints_credential(self, data_dir, capsys):
        code, out, _ = run(capsys, "--data-dir", data_dir, "users", "create",
                           "--name", "Ada", "--role", "admin", "--id", "admin")
        assert code == 0
        assert "created admin admin" in out
        assert "credential:" in out

    def test_list(self, provisioned, capsys):
        code, out, _ = run(capsys, "--data-dir", provisioned, "users", "list")
        assert code == 0
        assert "t1" in out and "translator" in out

    def test_bad_role_exits_1(self, data_dir, capsys):
        with pytest.raises(SystemExit) as exc:
            run(capsys, "--data-dir", data_dir, "users", "create",
                "--name", "X", "--role", "boss")
        assert exc.value.code == 1


class TestImport:
    def test_two_valid_lines(self, provisioned, tmp_path, capsys):
        f = write_import_file(tmp_path / "in.ndjson", ["The kettle.", "A lamp."])
        code, out, _ = run(capsys, "--data-dir", provisioned, "import", f, "--batch", "b1")
        assert code == 0
        assert "imported 2, skipped 0" in out

    def test_malformed_line_names_line_and_imports_nothing(self, provisioned, tmp_path, capsys):
        f = tmp_path / "bad.ndjson"
        f.write_text('{"en": "fine"}\n{oops}\n{"en": "also fine"}\n', encoding="utf-8")
        code, out, err = run(capsys, "--data-dir", provisioned, "import", str(f), "--batch", "b1")
        assert code == 1
        assert "line 2" in err
        code, out, _ = run(capsys, "--data-dir", provisioned, "stats")
        assert "sentence pairs:         0" in out

    def test_blank_en_rejected_with_line_number(self, provisioned, tmp_path, capsys):
        f = tmp_path / "bad.ndjson"
        f.write_text('{"en": "fine"}\n{"en": "  "}\n', encoding="utf-8")
        code, _, err = run(capsys, "--data-dir", provisioned, "import", str(f), "--batch", "b1")
        assert code == 1
        assert "line 2" in err

    def test_reimport_skips_all(self, provisioned, tmp_path, capsys):
        f = write_import_file(tmp_path / "in.ndjson", ["a", "b"])
        run(capsys, "--data-dir", provisioned, "import", f, "--batch", "b1")
        code, out, _ = run(capsys, "--data-dir", provisioned, "import", f, "--batch", "b2")
        assert code == 0
        assert "imported 0, skipped 2" in out

    def test_missing_file_is_io_error(self, provisioned, capsys):
        code, _, err = run(capsys, "--data-dir", provisioned, "import", "/no/such/file",
                           "--batch", "b1")
        assert code == 2

    def test_missing_admin_is_validation_error(self, data_dir, tmp_path, capsys):
        f = write_import_file(tmp_path / "in.ndjson", ["a"])
        code, _, err = run(capsys, "--data-dir", data_dir, "import", f, "--batch", "b1")
        assert code == 1
        assert "--actor required" in err


def drive_one_approval(provisioned):
    """Approve one sentence end to end directly against the data dir."""
    from corpusforge.domain import ReviewDecision
    from corpusforge.runtime import open_platform

    p = open_platform(provisioned, sync=False)
    try:
        wf = p.workflow
        admin = wf.get_user("admin")
        translator = wf.get_user("t1")
        reviewer = wf.get_user("r1")
        wf.import_batch(admin, "cli-b", ["Vula'a song lines."])
        sentence = wf.claim_next(translator)
        translation = wf.submit_translation(translator, sentence.id, "vula'a rere")
        wf.review_translation(reviewer, translation.id, ReviewDecision.APPROVE)
    finally:
        p.close()


class TestExport:
    def test_empty_corpus(self, provisioned, tmp_path, capsys):
        out_file = tmp_path / "out.ndjson"
        code, out, _ = run(capsys, "--data-dir", provisioned, "export", str(out_file))
        assert code == 0
        assert "exported 0 records" in out
        assert out_file.read_text() == ""

    def test_one_approved_parses_back(self, provisioned, tmp_path, capsys):
        drive_one_approval(provisioned)
        out_file = tmp_path / "out.ndjson"
        code, out, _ = run(capsys, "--data-dir", provisioned, "export", str(out_file))
        assert code == 0
        assert "exported 1 records" in out
        record = json.loads(out_file.read_text().splitlines()[0])
        assert record["english_text"] == "Vula'a song lines."
        assert record["hula_text"] == "vula'a rere"
        assert record["attempts"] == 1

    def test_round_trip_into_fresh_instance(self, provisioned, tmp_path, capsys):
        drive_one_approval(provisioned)
        out_file = tmp_path / "out.ndjson"
        run(capsys, "--data-dir", provisioned, "export", str(out_file))
        exported = [json.loads(l) for l in out_file.read_text().splitlines()]
        reimport = tmp_path / "reimport.ndjson"
        write_import_file(reimport, [r["english_text"] for r in exported])

        fresh = str(tmp_path / "fresh")
        run(capsys, "--data-dir", fresh, "users", "create", "--name", "A",
            "--role", "admin", "--id", "admin")
        code, out, _ = run(capsys, "--data-dir", fresh, "import", str(reimport), "--batch", "b1")
        assert code == 0

        from corpusforge.runtime import open_platform
        p = open_platform(fresh, sync=False)
        try:
            english = {r.payload["english_text"] for r in p.store.query("sentence")}
        finally:
            p.close()
        assert english == {r["english_text"] for r in exported}


class TestLedgerCommands:
    def test_contribute_report_disburse_export(self, provisioned, tmp_path, capsys):
        code, out, _ = run(capsys, "--data-dir", provisioned, "ledger", "contribute",
                           "--member", "m1", "--amount-toea", "1000")
        assert code == 0
        drive_one_approval(provisioned)
        code, out, _ = run(capsys, "--data-dir", provisioned, "ledger", "report")
        assert "pool:            1000" in out
        assert "t1: 10" in out
        code, out, _ = run(capsys, "--data-dir", provisioned, "ledger", "disburse",
                           "--translator", "t1", "--amount-toea", "10")
        assert code == 0
        out_file = tmp_path / "ledger.ndjson"
        code, out, _ = run(capsys, "--data-dir", provisioned, "ledger", "export", str(out_file))
        entries = [json.loads(l) for l in out_file.read_text().splitlines()]
        assert [e["kind"] for e in entries] == ["contribution", "accrual", "disbursement"]
        assert [e["seq"] for e in entries] == [1, 2, 3]

    def test_overdraw_is_validation_error(self, provisioned, capsys):
        code, _, err = run(capsys, "--data-dir", provisioned, "ledger", "disburse",
                           "--translator", "t1", "--amount-toea", "10")
        assert code == 1


class TestSpectrumCommand:
    def test_single_profile(self, capsys):
        code, out, _ = run(capsys, "spectrum", "CCCC")
        assert code == 0
        assert "level 5: Fully community-initiated and governed" in out

    def test_consultation_flag(self, capsys):
        code, out, _ = run(capsys, "spectrum", "EEEE", "--consultation")
        assert code == 0
        assert "level 1" in out

    def test_extrapolation_note(self, capsys):
        code, out, _ = run(capsys, "spectrum", "CEEE")
        assert code == 0
        assert "extrapolation" in out

    def test_published_profile_has_no_note(self, capsys):
        code, out, _ = run(capsys, "spectrum", "EECS")
        assert code == 0
        assert "level 3" in out
        assert "extrapolation" not in out

    def test_bad_codes_exit_1(self, capsys):
        code, _, err = run(capsys, "spectrum", "EEXS")
        assert code == 1

    def test_missing_args_exit_1(self, capsys):
        code, _, err = run(capsys, "spectrum")
        assert code == 1

    def test_batch_mode(self, tmp_path, capsys):
        f = tmp_path / "profiles.ndjson"
        f.write_text(
            '{"name": "Aromanian", "codes": "EEEE"}\n'
            '{"name": "Hula", "codes": "CCCC"}\n'
            '{"name": "odd", "codes": "CEEE"}\n',
            encoding="utf-8",
        )
        code, out, _ = run(capsys, "spectrum", "--batch", str(f))
        assert code == 0
        assert "Aromanian" in out and " 2  " in out
        assert "Hula" in out and " 5  " in out
        assert "extrapolation" in out


class TestSimulateCommand:
    def test_tiny_run(self, capsys):
        code, out, _ = run(capsys, "simulate", "--sentences", "5", "--translators", "2",
                           "--reviewers", "1", "--p1", "0.5", "--p2", "0.5", "--seed", "7")
        assert code == 0
        assert "simulation report (seed=7)" in out
        assert "violations: 0" in out

    def test_single_sentence_always_approved(self, capsys):
        code, out, _ = run(capsys, "simulate", "--sentences", "1", "--translators", "1",
                           "--reviewers", "1", "--p1", "1.0", "--p2", "1.0", "--seed", "1")
        assert code == 0
        assert "after 1:  100.00%" in out

    def test_same_seed_byte_identical(self, capsys):
        args = ["simulate", "--sentences", "20", "--translators", "3", "--reviewers", "2",
                "--p1", "0.8", "--p2", "0.9", "--seed", "99"]
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second

    def test_invalid_params_exit_1(self, capsys):
        code, _, err = run(capsys, "simulate", "--sentences", "0")
        assert code == 1
        code, _, err = run(capsys, "simulate", "--p1", "1.5")
        assert code == 1


class TestStatsCommand:
    def test_stats_after_approval(self, provisioned, capsys):
        drive_one_approval(provisioned)
        code, out, _ = run(capsys, "--data-dir", provisioned, "stats")
        assert code == 0
        assert "sentence pairs:         1" in out
        assert "batch cli-b" in out


class TestSimulatorInvariants:
    def test_ten_random_seeds_never_violate_invariants(self, tmp_path):
        from corpusforge.simulate import SimulationConfig, run_simulation

        for seed in range(10):
            config = SimulationConfig(
                sentences=25, translators=4, reviewers=2,
                p1=0.7, p2=0.6, seed=seed, check_every=10,
            )
            result = run_simulation(config, tmp_path / f"seed{seed}")
            assert result.violations == [], f"seed {seed}"
            assert result.invariant_checks > 0
