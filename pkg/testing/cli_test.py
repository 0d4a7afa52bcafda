import unittest, io, os, warnings
from contextlib import redirect_stdout, redirect_stderr
from unittest import mock

from quantum_periods_py.cli import main, parse_filters, read_source, UsageError, EXIT_OK, EXIT_ERROR, \
    EXIT_VALIDATION_FAILED, EXIT_USAGE
from quantum_periods_py.database.kvdb import parse_fragment, parse_database
from quantum_periods_py.static import database_path
from quantum_periods_py.utils import generate_temporary_file_path, write_text_file, load_from_json


def run(argv, stdin_text=None):
    """Returns (exit code, stdout, stderr)"""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err), warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if stdin_text is None:
            code = main(argv)
        else:
            with mock.patch("sys.stdin", io.StringIO(stdin_text)):
                code = main(argv)
    return code, out.getvalue(), err.getvalue()


class TestCommands(unittest.TestCase):

    def setUp(self):
        self.temp_paths = []

    def tearDown(self):
        for path in self.temp_paths:
            if os.path.exists(path):
                os.remove(path)

    def temp_file(self, text=None, extension="txt"):
        path = generate_temporary_file_path(extension=extension)
        self.temp_paths.append(path)
        if text is not None:
            write_text_file(text, path)
        return path

    def test_expand(self):
        code, out, _ = run(["expand", database_path(1) + "#1", "--terms", "8"])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "period: [1,0,2,0,6,0,20,0,70]\n")

    def test_expand_fit_pipe(self):
        _, period, _ = run(["expand", database_path(1) + "#1", "--terms", "20"])
        code, out, _ = run(["fit", "-"], stdin_text=period)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(parse_fragment(out), {"pf_coefficients": [4, -1, 4], "pf_exponents": [[1, 2], [1, 0], [0, 2]]})

    def test_fit_not_found(self):
        code, _, err = run(["fit", "-"], stdin_text="period: [1,0]\n")
        self.assertEqual(code, EXIT_ERROR)
        self.assertIn("search_exhausted", err)

    def test_analyze(self):
        report_path = self.temp_file(extension="json")
        code, out, _ = run(["analyze", database_path(1) + "#1", "--report", report_path])
        self.assertEqual(code, EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[0], "rank: 1")
        self.assertIn("point: 1/2; exponents: [-1/2]; invariant_dim: 0; contribution: 1", lines)
        self.assertIn("point: infinity; exponents: [1]; invariant_dim: 1; contribution: 0", lines)
        self.assertEqual(lines[-4:], ["rf: 2", "defect: 0", "extremal: true", "completeness: full"])
        self.assertEqual(load_from_json(report_path)["defect"], 0)

    def test_analyze_not_fuchsian(self):
        source = self.temp_file("pf_coefficients: [1,1]\npf_exponents: [[1,3],[0,0]]\n")
        code, _, err = run(["analyze", source])
        self.assertEqual(code, EXIT_ERROR)
        self.assertIn("Irregular singular point at 0", err)

    def test_product(self):
        source = database_path(1) + "#1"
        code, out, _ = run(["product", source, source, "--terms", "6"])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "period: [1,0,4,0,36,0,400]\nnames: [P1 x P1]\n")

    def test_query(self):
        code, out, _ = run(["query", "--data", database_path(4), "c4=72", "c5=360"])
        self.assertEqual(code, EXIT_OK)
        db = parse_database(out, 4)
        self.assertEqual(db.ids, [32])
        code, out, _ = run(["query", "--data", database_path(4), "id=2"])
        self.assertEqual(out, "")

    def test_query_argument_order(self):
        _, before, _ = run(["query", "c4=72", "c5=360", "--data", database_path(4)])
        _, after, _ = run(["query", "--data", database_path(4), "c4=72", "c5=360"])
        self.assertEqual(before, after, "Filters should not depend on their position relative to --data")
        code, out, _ = run(["query", "c5=360", "--data", database_path(4), "--data", database_path(1)])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(parse_database(out, 4).ids, [32, 340])

    def test_validate(self):
        report_path = self.temp_file(extension="json")
        code, out, _ = run(["validate", database_path(1), "--ramification", "--report", report_path])
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out.startswith("1: ok ("))
        self.assertIn("defect=0", out)
        self.assertTrue(out.endswith("records: 1, failed: 0\n"))
        report = load_from_json(report_path)
        self.assertTrue(report["ok"])
        self.assertEqual(report["num_records"], 1)

    def test_validate_failure(self):
        path = generate_temporary_file_path(prefix="smooth_fano_1_", extension="txt")
        self.temp_paths.append(path)
        write_text_file("id: 1\nperiod: [1,0,3]\nnames: [P1]\npf_coefficients: [4,-1,4]\n"
                        "pf_exponents: [[1,2],[1,0],[0,2]]\npf_proven: false\nnotes: broken\n", path)
        code, out, _ = run(["validate", path])
        self.assertEqual(code, EXIT_VALIDATION_FAILED)
        self.assertIn("1: FAILED", out)
        self.assertIn("annihilation: nonzero residuals at e = [2]", out)

    def test_parse_error(self):
        source = self.temp_file("period: [1,0,\n")
        code, _, err = run(["fit", source])
        self.assertEqual(code, EXIT_ERROR)
        self.assertIn("parse error", err)


class TestUsage(unittest.TestCase):

    def test_exit_codes(self):
        self.assertEqual(run(["expand", "no_such_file.txt"])[0], EXIT_USAGE)
        self.assertEqual(run(["expand", database_path(1) + "#9"])[0], EXIT_USAGE)
        self.assertEqual(run(["expand", database_path(1) + "#one"])[0], EXIT_USAGE)
        self.assertEqual(run(["expand", "-"], stdin_text="period: [1,0]\n")[0], EXIT_USAGE)
        self.assertEqual(run(["query", "--data", database_path(4), "c9=1"])[0], EXIT_USAGE)

    def test_argparse_errors(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                main(["frobnicate"])
        self.assertEqual(cm.exception.code, EXIT_USAGE)
        for argv in (["expand", database_path(1) + "#1", "c4=72"], ["query", "--data", database_path(4), "--bogus"]):
            with redirect_stderr(io.StringIO()):
                with self.assertRaises(SystemExit) as cm:
                    main(argv)
            self.assertEqual(cm.exception.code, EXIT_USAGE, "Stray arguments in {}".format(argv))

    def test_parse_filters(self):
        self.assertEqual(parse_filters(["id=340", "name=CKP", "c4=72"]),
                         {"id": 340, "name": "CKP", "coefficients": {4: 72}})
        self.assertRaises(UsageError, parse_filters, ["c4"])
        self.assertRaises(UsageError, parse_filters, ["c4=x"])

    def test_read_source(self):
        values = read_source(database_path(2) + "#2")
        self.assertEqual(values["names"], ["P1 x P1"])
        self.assertEqual(values["pf_exponents"], [[2, 2], [2, 0], [1, 2], [0, 2]])


if __name__ == '__main__':
    unittest.main()
