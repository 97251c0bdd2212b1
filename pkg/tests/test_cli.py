import json

import pytest

from topoplan import cli
from topoplan import mapgen as mg
from topoplan.gridmap import dump_pgm


@pytest.fixture(scope="module")
def artifact(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    grid = mg.gen_cluttered(size=80, obstacles=2, seed=4)
    map_path = root / "map.pgm"
    map_path.write_bytes(dump_pgm(grid))
    art_path = root / "map.artifact.json"
    rc = cli.main(["init", "--map", str(map_path), "--epsilon", "1.0",
                   "--out", str(art_path)])
    assert rc == cli.EXIT_OK
    return root, map_path, art_path


class TestInit:
    def test_artifact_written(self, artifact, capsys):
        root, _, art_path = artifact
        doc = json.loads(art_path.read_text())
        assert doc["format"] == "topoplan-artifact-v1"
        assert doc["components"]

    def test_init_deterministic(self, artifact, tmp_path):
        _, map_path, art_path = artifact
        out2 = tmp_path / "again.json"
        rc = cli.main(["init", "--map", str(map_path), "--epsilon", "1.0",
                       "--out", str(out2)])
        assert rc == cli.EXIT_OK
        assert out2.read_text() == art_path.read_text()

    def test_missing_file_is_io_error(self, tmp_path):
        rc = cli.main(["init", "--map", str(tmp_path / "nope.pgm"),
                       "--out", str(tmp_path / "x.json")])
        assert rc == cli.EXIT_IO

    def test_malformed_map_is_io_error(self, tmp_path):
        bad = tmp_path / "bad.pgm"
        bad.write_bytes(b"P5\n4 4\n255\n\x00")
        rc = cli.main(["init", "--map", str(bad), "--out", str(tmp_path / "x.json")])
        assert rc == cli.EXIT_IO


class TestPlan:
    def test_plan_writes_report_and_svg(self, artifact, tmp_path):
        _, _, art_path = artifact
        out = tmp_path / "plan.json"
        svg = tmp_path / "plan.svg"
        rc = cli.main(["plan", "--artifact", str(art_path),
                       "--start", "5,5", "--goal", "74,74",
                       "--iterations", "300", "--seed", "7",
                       "--out", str(out), "--svg", str(svg)])
        assert rc == cli.EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["plan"]["length"] > 0
        assert doc["plan"]["code"]
        assert svg.read_text().startswith("<svg")

    def test_plan_section_deterministic_for_fixed_seed(self, artifact, tmp_path):
        _, _, art_path = artifact
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            rc = cli.main(["plan", "--artifact", str(art_path),
                           "--start", "5,5", "--goal", "74,74",
                           "--iterations", "300", "--seed", "7",
                           "--out", str(out)])
            assert rc == cli.EXIT_OK
            outs.append(json.dumps(json.loads(out.read_text())["plan"], sort_keys=True))
        assert outs[0] == outs[1]

    def test_unreachable_exit_code(self, artifact, tmp_path):
        _, _, art_path = artifact
        rc = cli.main(["plan", "--artifact", str(art_path),
                       "--start", "5,5", "--goal", "500,500",
                       "--out", str(tmp_path / "x.json")])
        assert rc == cli.EXIT_UNREACHABLE

    def test_bad_point_syntax_invalid(self, artifact, tmp_path):
        _, _, art_path = artifact
        rc = cli.main(["plan", "--artifact", str(art_path),
                       "--start", "5", "--goal", "74,74"])
        assert rc == cli.EXIT_INVALID


class TestEncode:
    def test_detour_equals_direct(self, artifact, tmp_path, capsys):
        _, _, art_path = artifact
        direct = tmp_path / "direct.json"
        direct.write_text(json.dumps([[5.0, 5.0], [8.0, 8.0]]))
        rc = cli.main(["encode", "--artifact", str(art_path),
                       "--polyline", str(direct)])
        assert rc == cli.EXIT_OK
        code_direct = capsys.readouterr().out.strip()

        detour = tmp_path / "detour.json"
        detour.write_text(json.dumps([[5.0, 5.0], [6.0, 9.0], [8.0, 8.0]]))
        rc = cli.main(["encode", "--artifact", str(art_path),
                       "--polyline", str(detour)])
        assert rc == cli.EXIT_OK
        code_detour = capsys.readouterr().out.strip()
        assert code_direct == code_detour

    def test_polyline_outside_invalid(self, artifact, tmp_path):
        _, _, art_path = artifact
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps([[5.0, 5.0], [400.0, 400.0]]))
        rc = cli.main(["encode", "--artifact", str(art_path),
                       "--polyline", str(bad)])
        assert rc == cli.EXIT_INVALID


class TestGenmapsAndBench:
    def test_genmaps_writes_files(self, tmp_path, capsys):
        rc = cli.main(["genmaps", "--out-dir", str(tmp_path), "--archetype",
                       "cluttered", "--seed", "3", "--count", "2"])
        assert rc == cli.EXIT_OK
        files = sorted(tmp_path.glob("*.pgm"))
        assert len(files) == 2

    def test_bench_smoke_csv(self, tmp_path):
        out = tmp_path / "bench.csv"
        rc = cli.main(["bench", "--archetypes", "cluttered",
                       "--planners", "cdt", "rrt-star",
                       "--repetitions", "2", "--tasks", "1",
                       "--iterations", "200", "--seed", "5",
                       "--format", "csv", "--out", str(out)])
        assert rc == cli.EXIT_OK
        lines = out.read_text().strip().splitlines()
        header = lines[0].split(",")
        assert header[:4] == ["map", "task", "planner", "beta"]
        assert len(lines) == 1 + 2 * 2  # two planners x two reps

    def test_bench_deterministic(self, tmp_path):
        texts = []
        for name in ("r1.csv", "r2.csv"):
            out = tmp_path / name
            rc = cli.main(["bench", "--archetypes", "cluttered",
                           "--planners", "cdt",
                           "--repetitions", "1", "--tasks", "1",
                           "--iterations", "150", "--seed", "9",
                           "--format", "csv", "--out", str(out)])
            assert rc == cli.EXIT_OK
            # timing columns vary run to run; compare the stable columns
            rows = []
            for line in out.read_text().strip().splitlines():
                cols = line.split(",")
                rows.append([cols[i] for i in (0, 1, 2, 3, 4, 5, 6, 9, 10)])
            texts.append(rows)
        assert texts[0] == texts[1]
