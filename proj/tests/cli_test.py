"""End-to-end checks of the lt binary: outputs, exit codes, determinism."""

import json
import os
import subprocess
import sys
import tempfile
import unittest

LT = None


def run(*args, env=None):
    proc = subprocess.run([LT, *args], capture_output=True, text=True, env=env)
    return proc.returncode, proc.stdout, proc.stderr


def run_json(*args, env=None):
    code, out, _ = run(*args, "--json", env=env)
    return code, json.loads(out) if out.strip() else None


def digits(x):
    return [d[0] for d in x["pi_digits"]]


class Group(unittest.TestCase):
    def test_three_on_q2(self):
        code, j = run_json("group", "--preset", "Q2", "--prec-t", "8", "--a", "3", "--a", "1")
        self.assertEqual(code, 0)
        three, one = j["a_series"]
        # T^3 + 3T^2 + 3T with 3 = 1 + 2
        coeffs = [digits(c)[:2] for c in three["series"]["coeffs"]]
        self.assertEqual(coeffs[:4], [[0, 0], [1, 1], [1, 1], [1, 0]])
        self.assertTrue(all(d == [0, 0] for d in coeffs[4:]))
        ones = [any(digits(c)) for c in one["series"]["coeffs"]]
        self.assertEqual(ones, [False, True] + [False] * 6)

    def test_bad_preset(self):
        code, _, err = run("group", "--preset", "Q7")
        self.assertEqual(code, 2)
        self.assertIn("unknown preset", err)

    def test_bad_precision(self):
        self.assertEqual(run("group", "--prec-pi", "1")[0], 2)
        self.assertEqual(run("frobnicate")[0], 2)

    def test_inline_field(self):
        code, j = run_json("series", "--p", "5", "--eisenstein", "-5,1", "--a", "2", "--prec-t", "6")
        self.assertEqual(code, 0)
        self.assertEqual(j["field"]["p"], 5)

    def test_preset_dir(self):
        with tempfile.TemporaryDirectory() as d:
            with open(os.path.join(d, "Q5.json"), "w") as f:
                json.dump({"p": 5, "eisenstein": [-5, 1]}, f)
            env = dict(os.environ, LT_FORGE_PRESET_DIR=d)
            code, j = run_json("group", "--preset", "Q5", "--prec-t", "6", env=env)
            self.assertEqual(code, 0)
            self.assertEqual(j["field"]["name"], "Q5")

    def test_exp_log_agree(self):
        _, a = run_json("series", "--preset", "Q3_unr2", "--a", "4", "--prec-t", "20")
        _, b = run_json("series", "--preset", "Q3_unr2", "--a", "4", "--prec-t", "20", "--via-exp-log")
        self.assertEqual(a["series"], b["series"])


class Check(unittest.TestCase):
    def test_noltrace_skips_on_q2(self):
        code, j = run_json("check", "noltrace", "--preset", "Q2")
        self.assertEqual(code, 0)
        self.assertEqual(j["checks"][0]["status"], "SKIP")

    def test_pginv(self):
        code, j = run_json("check", "pginv", "--preset", "Q3_unr2")
        self.assertEqual(code, 0)
        self.assertEqual(j["checks"][0]["witness"]["dimension"], 1)

    def test_sorted_and_deterministic(self):
        args = ("check", "valexp", "groupaxioms", "islocan", "--preset", "Q2_ram2", "--prec-t", "24", "--seed", "9", "--json")
        first = run(*args)
        second = run(*args)
        self.assertEqual(first[0], 0)
        self.assertEqual(first[1], second[1])
        names = [c["name"] for c in json.loads(first[1])["checks"]]
        self.assertEqual(names, sorted(names))

    def test_valexp_all_presets(self):
        for p in ("Q2", "Q3", "Q2_unr2", "Q3_unr2", "Q2_ram2"):
            code, j = run_json("check", "valexp", "--preset", p)
            self.assertEqual((p, code, j["checks"][0]["status"]), (p, 0, "PASS"))

    def test_unknown_check(self):
        self.assertEqual(run("check", "nosuch")[0], 2)


class Recover(unittest.TestCase):
    def write(self, d, obj):
        path = os.path.join(d, "u.json")
        with open(path, "w") as f:
            json.dump(obj, f)
        return path

    def test_generated(self):
        code, j = run_json("recover", "--preset", "Q2_unr2", "--depth", "2", "--seed", "4")
        self.assertEqual(code, 0)
        self.assertTrue(j["round_trip"])
        self.assertEqual(j["result"]["depth"], 2)

    def test_files(self):
        with tempfile.TemporaryDirectory() as d:
            code, j = run_json("recover", "--input", self.write(d, {"depth": 0, "order": 64, "coeffs": [[1, 1]]}))
            self.assertEqual(code, 0)
            self.assertEqual(digits(j["result"]["a"]), [1] + [0] * (j["result"]["precision"] - 1))
            code, j = run_json("recover", "--input", self.write(d, {"depth": 0, "order": 64, "coeffs": [[2, 1]]}))
            self.assertEqual(code, 1)
            self.assertEqual(j["error"], "WrongValuation")
            code, j = run_json("recover", "--input", self.write(d, {"depth": 0, "order": 64, "coeffs": [[1, 1], [3, 1]]}))
            self.assertEqual(code, 1)
            self.assertEqual(j["error"], "NotEquivariant")
            self.assertEqual(run("recover", "--input", os.path.join(d, "missing.json"))[0], 2)

    def test_lift(self):
        code, j = run_json("lift", "--preset", "Q3", "--a", "4", "--depth", "1", "--prec-t", "27", "--prec-pi", "3")
        self.assertEqual(code, 0)
        self.assertTrue(j["frobenius_equation"])
        self.assertEqual(j["lift"]["digit_orders"], [27, 9, 3])


if __name__ == "__main__":
    LT = sys.argv.pop(1)
    unittest.main()
