"""End-to-end runs of the console script in subprocesses.

Everything here shells out for real: the exit-code triage and the
byte-level output contract are part of the interface. The heavyweight
suite command is exercised in test_acceptance instead.
"""

import json
import subprocess
import sys

import pytest

SPACE8 = '{"kind":"finite","size":8}'


def run_cli(*argv, stdin=None):
    return subprocess.run(
        [sys.executable, "-m", "ordfrag.cli", *argv],
        capture_output=True, text=True, input=stdin, timeout=120)


def out_json(proc):
    return json.loads(proc.stdout)


@pytest.fixture(scope="module")
def comb_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "comb.json"
    proc = run_cli("staged", "gen", "--kind", "comb", "--seed", "3",
                   "--teeth", "4", "--room", "3", "--out", str(path))
    assert proc.returncode == 0, proc.stderr
    return path


@pytest.fixture(scope="module")
def levels_file(comb_file, tmp_path_factory):
    path = comb_file.parent / "levels.json"
    proc = run_cli("frag", "ln", "--in", str(comb_file), "--out", str(path))
    assert proc.returncode == 0, proc.stderr
    return path


class TestSpace:
    def test_show_lists_finite_points(self):
        proc = run_cli("space", "show", "--space", SPACE8)
        assert proc.returncode == 0
        doc = out_json(proc)
        assert doc["points"] == [str(i) for i in range(8)]
        assert doc["min"] == "0" and doc["max"] == "7"

    def test_show_ordinal_has_no_point_list(self):
        proc = run_cli("space", "show", "--space", '{"kind":"ordinal","alpha":"w^2"}')
        doc = out_json(proc)
        assert doc["finite"] is False
        assert "points" not in doc
        assert doc["max"] == "w^2"

    def test_sample_is_seed_deterministic(self):
        a = run_cli("space", "sample", "--space", SPACE8, "--seed", "9")
        b = run_cli("space", "sample", "--space", SPACE8, "--seed", "9")
        assert a.stdout == b.stdout
        c = run_cli("space", "sample", "--space", SPACE8, "--seed", "10")
        assert c.stdout != a.stdout

    def test_bad_space_json_is_exit_2(self):
        proc = run_cli("space", "show", "--space", '{"kind":')
        assert proc.returncode == 2
        assert "line 1 column" in proc.stderr


class TestTree:
    def test_build_verify_roundtrip(self, tmp_path):
        path = tmp_path / "tree.json"
        built = run_cli("tree", "build", "--space", SPACE8,
                        "--budget", "100", "--out", str(path))
        assert built.returncode == 0
        doc = json.loads(path.read_text())
        assert doc["kind"] == "tree" and doc["v"] == 1
        verified = run_cli("tree", "verify", "--in", str(path))
        assert verified.returncode == 0
        assert out_json(verified)["ok"] is True

    def test_tampered_tree_fails_with_exit_1(self, tmp_path):
        path = tmp_path / "tree.json"
        run_cli("tree", "build", "--space", SPACE8, "--budget", "100",
                "--out", str(path))
        doc = json.loads(path.read_text())
        doc["nodes"][1]["interval"] = ["0", "7"]  # duplicate the root cell
        path.write_text(json.dumps(doc))
        proc = run_cli("tree", "verify", "--in", str(path))
        assert proc.returncode == 1
        report = out_json(proc)
        assert report["ok"] is False and report["violations"]

    def test_export_writes_dot(self, tmp_path):
        path = tmp_path / "tree.json"
        run_cli("tree", "build", "--space", SPACE8, "--budget", "40",
                "--out", str(path))
        proc = run_cli("tree", "export", "--in", str(path))
        assert proc.returncode == 0
        assert proc.stdout.startswith("digraph tree {")
        assert "->" in proc.stdout

    def test_stdin_dash_works(self, tmp_path):
        path = tmp_path / "tree.json"
        run_cli("tree", "build", "--space", SPACE8, "--budget", "40",
                "--out", str(path))
        proc = run_cli("tree", "verify", "--in", "-", stdin=path.read_text())
        assert proc.returncode == 0


class TestStaged:
    def test_gen_is_deterministic_per_seed(self):
        a = run_cli("staged", "gen", "--kind", "random", "--seed", "12")
        b = run_cli("staged", "gen", "--kind", "random", "--seed", "12")
        assert a.stdout == b.stdout

    def test_miniature_depth_4_counts(self):
        proc = run_cli("staged", "gen", "--kind", "miniature", "--depth", "4",
                       "--pool-mode", "full")
        doc = out_json(proc)
        tops = [r["id"] for r in doc["nodes"] if r["level"] == doc["top_level"]]
        pool = [r["id"] for r in doc["nodes"] if r["level"] in doc["pool"]]
        assert len(tops) == 8 and len(pool) == 7

    def test_check_simple_triage(self, comb_file, tmp_path):
        good = run_cli("staged", "check-simple", "--in", str(comb_file))
        assert good.returncode == 0
        assert out_json(good)["simple"] is True
        mini = tmp_path / "mini.json"
        run_cli("staged", "gen", "--kind", "miniature", "--depth", "3",
                "--out", str(mini))
        bad = run_cli("staged", "check-simple", "--in", str(mini))
        assert bad.returncode == 1
        doc = out_json(bad)
        assert doc["simple"] is False
        assert len(doc["violator"]["members"]) > len(doc["violator"]["neighborhood"])

    def test_constructions_emit_witnesses(self, comb_file):
        for op in ("disjoint", "compose", "bounded", "cofinal"):
            proc = run_cli("staged", "construct", op, "--in", str(comb_file))
            assert proc.returncode == 0, (op, proc.stderr)
            assert out_json(proc)["map"]
        union = run_cli("staged", "construct", "union", "--seed", "5")
        assert union.returncode == 0
        assert out_json(union)["kind"] == "regressive-map"

    def test_partition_refusal_is_machine_readable(self, tmp_path):
        mini = tmp_path / "mini.json"
        run_cli("staged", "gen", "--kind", "miniature", "--depth", "3",
                "--out", str(mini))
        proc = run_cli("staged", "partition", "--in", str(mini))
        assert proc.returncode == 1
        doc = out_json(proc)
        assert doc["kind"] == "refusal" and doc["error"] == "NotSimple"
        assert doc["violator"]["members"]

    def test_partition_dot_colors_cells(self, comb_file, tmp_path):
        dot = tmp_path / "p.dot"
        proc = run_cli("staged", "partition", "--in", str(comb_file),
                       "--dot", str(dot))
        assert proc.returncode == 0
        assert "fillcolor" in dot.read_text()


class TestFrag:
    def test_ln_emits_decomposition_with_space(self, levels_file):
        doc = json.loads(levels_file.read_text())
        assert doc["kind"] == "decomposition"
        assert doc["space"]["kind"] == "finite"
        assert doc["levels"][0] == ["0", "35"]

    def test_delta_gap_pairs(self, levels_file):
        proc = run_cli("frag", "delta", "--in", str(levels_file))
        doc = out_json(proc)
        assert doc["levels"][0] == [["0", "35"]]

    def test_density_negative_names_the_gap(self, levels_file):
        proc = run_cli("frag", "density", "--in", str(levels_file))
        assert proc.returncode == 1
        doc = out_json(proc)
        assert doc["ok"] is False and len(doc["gap"]) == 2

    def test_fragment_witness(self, levels_file):
        proc = run_cli("frag", "check", "--in", str(levels_file),
                       "--eps", "1/4")
        assert proc.returncode == 0
        doc = out_json(proc)
        assert doc["inside"] and doc["diameter"] == "0"

    def test_weight_triage(self, comb_file, tmp_path):
        good = run_cli("frag", "weight", "--in", str(comb_file))
        assert good.returncode == 0
        assert out_json(good)["margin"] >= 0
        mini = tmp_path / "mini.json"
        run_cli("staged", "gen", "--kind", "miniature", "--depth", "3",
                "--out", str(mini))
        bad = run_cli("frag", "weight", "--in", str(mini))
        assert bad.returncode == 1
        doc = out_json(bad)
        assert doc["hall"] == [4, 1] and doc["margin"] < 0


class TestRn:
    def test_witness_bundle_and_approx(self, levels_file, tmp_path):
        bundle = tmp_path / "bundle.json"
        built = run_cli("rn", "witness", "--in", str(levels_file),
                        "--out", str(bundle))
        assert built.returncode == 0
        doc = json.loads(bundle.read_text())
        assert doc["kind"] == "rn-witness" and doc["family"]
        proc = run_cli("rn", "approx", "--in", str(bundle),
                       "--point", "13", "--n", "4")
        assert proc.returncode == 0
        ans = out_json(proc)
        assert ans["z"]
        num, _, den = ans["distance"].partition("/")
        assert int(num) * 4 < int(den or 1)  # d(w, z) < 1/4, exactly

    def test_dense_set_lists_m_sets(self, levels_file):
        proc = run_cli("rn", "dense", "--in", str(levels_file))
        doc = out_json(proc)
        assert doc["kind"] == "rn-dense"
        assert doc["m"][0][0] == 1

    def test_check_reports_unseparated_pair_on_sparse_levels(self, levels_file):
        proc = run_cli("rn", "check", "--in", str(levels_file),
                       "--subsets", "3")
        assert proc.returncode == 1
        doc = out_json(proc)
        assert doc["ok"] is False and len(doc["unseparated"]) == 2
        assert doc["subsets_checked"] == 0  # separation short-circuits density

    def test_check_passes_on_saturated_chain(self, tmp_path):
        # comb decompositions are sparse, so build a saturated instance
        from ordfrag import space as sp
        from ordfrag.frag import levels_to_json
        from ordfrag.suite import _chain_instance

        K, levels = _chain_instance(8)
        doc = levels_to_json(K, levels)
        doc["space"] = sp.space_to_json(K)
        lv = tmp_path / "sat.json"
        lv.write_text(json.dumps(doc))
        proc = run_cli("rn", "check", "--in", str(lv), "--subsets", "4")
        assert proc.returncode == 0, proc.stdout
        assert out_json(proc)["ok"] is True


class TestTriage:
    def test_unknown_subcommand_is_exit_2(self):
        proc = run_cli("space", "frobnicate")
        assert proc.returncode == 2

    def test_malformed_json_names_the_location(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"kind": "staged",')
        proc = run_cli("staged", "check-simple", "--in", str(path))
        assert proc.returncode == 2
        assert "column" in proc.stderr and "broken.json" in proc.stderr

    def test_wrong_document_kind_is_exit_2(self, comb_file):
        proc = run_cli("tree", "verify", "--in", str(comb_file))
        assert proc.returncode == 2
        assert "not a tree document" in proc.stderr

    def test_missing_file_is_exit_2(self):
        proc = run_cli("frag", "weight", "--in", "/no/such/file.json")
        assert proc.returncode == 2

    def test_outputs_are_canonical_bytes(self, comb_file):
        a = run_cli("staged", "check-simple", "--in", str(comb_file))
        b = run_cli("staged", "check-simple", "--in", str(comb_file))
        assert a.stdout == b.stdout
        assert a.stdout.endswith("\n")
        assert ": " not in a.stdout.splitlines()[0]
