"""End-to-end tests of the crf executable: exit codes, artifacts, determinism."""
import json
import os
import pathlib
import subprocess
import sys
import tempfile
import textwrap
import unittest

import jsonschema

CRF = os.environ["CRF_BIN"]
ROOT = pathlib.Path(os.environ["CRF_SOURCE_DIR"])
SCEN = ROOT / "scenarios"
SCHEMA = json.loads((ROOT / "schemas" / "run_report.schema.json").read_text())

DETERMINISTIC = ["config.json", "frames.csv", "checks.csv", "report.json"]


def crf(*args, out):
    return subprocess.run([CRF, "-o", str(out), *map(str, args)], capture_output=True, text=True, timeout=600)


class CliTest(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = pathlib.Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name, body):
        p = self.tmp / name
        p.write_text(textwrap.dedent(body))
        return p

    def test_list_metrics(self):
        r = crf("list-metrics", out=self.tmp)
        self.assertEqual(r.returncode, 0, r.stderr)
        for key in ["poincare-disk", "poincare-ke", "flat-torus", "hermitian-torus", "fubini-study-cap"]:
            self.assertIn(key, r.stdout)

    def test_unknown_metric_is_config_error(self):
        r = crf("run", SCEN / "negative" / "unknown-metric.yaml", out=self.tmp)
        self.assertEqual(r.returncode, 2)
        self.assertIn("klein-bottle", r.stderr)

    def test_every_config_problem_reported(self):
        cfg = self.write("bad.yaml", """\
            scenario: bad
            metric: {key: poincare-disk, params: {radius: 2}}
            grid: {kind: hexagonal, nodes: 3}
            flow: {horizon: -1, safety: 0}
            checks: [no_such_check]
            colour: blue
            """)
        r = crf("run", cfg, out=self.tmp)
        self.assertEqual(r.returncode, 2)
        for token in ["radius", "hexagonal", "horizon", "safety", "no_such_check", "colour"]:
            self.assertIn(token, r.stderr)

    def test_missing_config_file(self):
        r = crf("run", self.tmp / "nope.yaml", out=self.tmp)
        self.assertEqual(r.returncode, 2)

    def test_broken_suite_exits_one(self):
        r = crf("verify", SCEN / "negative" / "broken-suite.yaml", out=self.tmp)
        self.assertEqual(r.returncode, 1, r.stdout + r.stderr)
        table = (self.tmp / "verification.csv").read_text().splitlines()
        self.assertEqual(table[0].split(",")[:2], ["scenario", "check"])
        failing = [row for row in table[1:] if row.endswith(",0")]
        self.assertEqual(len(failing), 1)
        self.assertTrue(failing[0].startswith("uniqueness-tight,uniqueness_F"))

    def test_empty_suite_warns(self):
        r = crf("verify", SCEN / "negative" / "empty-suite.yaml", out=self.tmp)
        self.assertEqual(r.returncode, 0)
        self.assertIn("warning", r.stderr)

    def test_suite_with_missing_entry(self):
        m = self.write("m.yaml", "scenarios: [does-not-exist.yaml]\n")
        r = crf("verify", m, out=self.tmp)
        self.assertEqual(r.returncode, 2)

    def test_expected_failure_counts_as_ok(self):
        r = crf("run", SCEN / "uniqueness-scaled.yaml", out=self.tmp)
        self.assertEqual(r.returncode, 0, r.stdout)
        self.assertIn("not Kahler-Einstein", r.stdout)

    def small_blowup(self, expect):
        src = (SCEN / "fubini-study-blowup.yaml").read_text()
        src = src.replace("nodes: 64", "nodes: 24").replace("expect_breakdown: true", f"expect_breakdown: {expect}")
        return self.write(f"fs-{expect}.yaml", src)

    def test_unexpected_breakdown_exits_three(self):
        r = crf("run", self.small_blowup("false"), out=self.tmp)
        self.assertEqual(r.returncode, 3, r.stdout)
        rep = json.loads((self.tmp / "fubini-study-blowup" / "report.json").read_text())
        self.assertTrue(rep["breakdown"]["flag"])
        self.assertGreater(rep["breakdown"]["time"], 0.45)
        self.assertLess(rep["breakdown"]["time"], 0.5)

    def test_expected_breakdown_exits_zero(self):
        r = crf("run", self.small_blowup("true"), out=self.tmp)
        self.assertEqual(r.returncode, 0, r.stdout)

    def test_config_error_outranks_breakdown(self):
        m = self.write("m.yaml", f"scenarios: [{self.small_blowup('false')}, {SCEN / 'negative' / 'unknown-metric.yaml'}]\n")
        r = crf("verify", m, out=self.tmp)
        self.assertEqual(r.returncode, 2)

    def test_deterministic_artifacts_and_schema(self):
        runs = []
        for tag in ["a", "b"]:
            out = self.tmp / tag
            r = crf("run", SCEN / "bumpy-torus.yaml", "--plot", out=out)
            self.assertEqual(r.returncode, 0, r.stdout + r.stderr)
            runs.append(out / "bumpy-torus")
        for name in DETERMINISTIC:
            self.assertEqual((runs[0] / name).read_bytes(), (runs[1] / name).read_bytes(), name)
        self.assertTrue((runs[0] / "timing.json").exists())
        jsonschema.validate(json.loads((runs[0] / "report.json").read_text()), SCHEMA)
        svgs = sorted(p.name for p in runs[0].glob("*.svg"))
        self.assertIn("unnormalized_sup_lambda.svg", svgs)
        self.assertTrue(all((runs[0] / s).read_text().lstrip().startswith("<svg") for s in svgs))

    def test_plot_subcommand(self):
        crf("run", SCEN / "flat-torus-stationary.yaml", out=self.tmp)
        r = crf("plot", self.tmp / "flat-torus-stationary", out=self.tmp)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertTrue(r.stdout.strip())

    def test_plot_without_frames(self):
        r = crf("plot", self.tmp, out=self.tmp)
        self.assertEqual(r.returncode, 2)

    def test_output_root_from_environment(self):
        env = dict(os.environ, CRF_OUTPUT_ROOT=str(self.tmp / "envroot"))
        r = subprocess.run([CRF, "run", SCEN / "chen-oracle.yaml"], capture_output=True, text=True, env=env)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertTrue((self.tmp / "envroot" / "chen-oracle" / "report.json").exists())


class SuiteTest(unittest.TestCase):
    """The bundled suite: every expectation holds and every report validates."""

    def test_bundled_suite(self):
        with tempfile.TemporaryDirectory() as d:
            r = crf("verify", SCEN / "suite.yaml", out=d)
            self.assertEqual(r.returncode, 0, r.stdout + r.stderr)
            reports = list(pathlib.Path(d).glob("*/report.json"))
            self.assertEqual(len(reports), 14)
            for p in reports:
                jsonschema.validate(json.loads(p.read_text()), SCHEMA)


if __name__ == "__main__":
    unittest.main(argv=[sys.argv[0], *sys.argv[1:]], verbosity=2)
