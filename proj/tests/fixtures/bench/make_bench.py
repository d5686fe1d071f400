#!/usr/bin/env python3
"""Regenerates the 10-bug benchmark fixture.

Each bug is a one-file project (projects/<id>/Main.java plus tests.txt) run by
the test-only minijava interpreter; at least one test fails on the buggy code
and all pass on the reference. Outputs written:

  manifest.jsonl    all 10 bugs
  manifest3.jsonl   the first 3 bugs
  mock.json         canned OR2 outputs per bug id, rank order
  mock3.json        the reference chunk for each of the first 3 bugs

Expected aggregate for mock.json (counted by hand):
  plausible 8 (B01-B08), exact 6 (B01-B06), ast 6, semantic pending 2 (B07, B08).
Run from this directory: python3 make_bench.py
"""
import json
import os
import shutil

HEADER = "public class Main {\n"
HELPER = """
    static int unused(int x) {
        return x;
    }
"""

# id, buggy function, fixed function, region (function-relative, inclusive),
# tests, mock outputs (rank order), tags
BUGS = [
    ("B01",
     """    static int absDiff(int a, int b) {
        int d = a - b;
        if (d < 0) {
            d = d + 1;
        }
        return d;
    }""",
     """    static int absDiff(int a, int b) {
        int d = a - b;
        if (d < 0) {
            d = -d;
        }
        return d;
    }""",
     (4, 4),
     ["absDiff(5, 3) == 2", "absDiff(3, 5) == 2", "absDiff(4, 4) == 0"],
     ["d = -d;", "d = d + 1;"], []),
    ("B02",
     """    static int max3(int a, int b, int c) {
        return Math.max(a, b);
    }""",
     """    static int max3(int a, int b, int c) {
        return Math.max(a, Math.max(b, c));
    }""",
     (2, 2),
     ["max3(1, 2, 3) == 3", "max3(3, 2, 1) == 3", "max3(1, 3, 2) == 3"],
     ["return Math.max(a, Math.max(b, c));"], []),
    ("B03",
     """    static int sum(int[] xs) {
        int s = 0;
        for (int i = 1; i < xs.length; i++) {
            s += xs[i];
        }
        return s;
    }""",
     """    static int sum(int[] xs) {
        int s = 0;
        for (int i = 0; i < xs.length; i++) {
            s += xs[i];
        }
        return s;
    }""",
     (3, 3),
     ["sum(new int[] {1, 2, 3}) == 6", "sum(new int[0]) == 0"],
     ["for (int i = 0; i < xs.length; i++) {", "for (int i = 0; i <= xs.length; i++) {"], []),
    ("B04",
     """    static int fact(int n) {
        if (n == 0) {
            return 0;
        }
        return n * fact(n - 1);
    }""",
     """    static int fact(int n) {
        if (n == 0) {
            return 1;
        }
        return n * fact(n - 1);
    }""",
     (3, 3),
     ["fact(0) == 1", "fact(5) == 120"],
     ["return 1;"], []),
    ("B05",
     """    static boolean isEven(int n) {
        return n % 2 == 1;
    }""",
     """    static boolean isEven(int n) {
        return n % 2 == 0;
    }""",
     (2, 2),
     ["isEven(4)", "!isEven(7)"],
     ["return n % 2 == 0;"], []),
    ("B06",
     """    static int countPositive(int[] xs) {
        int n = 0;
        for (int i = 0; i < xs.length; i++) {
            if (xs[i] >= 0) {
                n++;
            }
        }
        int unusedA = 0;
        int unusedB = 0;
        int unusedC = 0;
        int unusedD = 0;
        int unusedE = 0;
        int unusedF = 0;
        int unusedG = 0;
        int unusedH = 0;
        return n + 1;
    }""",
     """    static int countPositive(int[] xs) {
        int n = 0;
        for (int i = 0; i < xs.length; i++) {
            if (xs[i] > 0) {
                n++;
            }
        }
        int unusedA = 0;
        int unusedB = 0;
        int unusedC = 0;
        int unusedD = 0;
        int unusedE = 0;
        int unusedF = 0;
        int unusedG = 0;
        int unusedH = 0;
        return n;
    }""",
     (4, 16),
     ["countPositive(new int[] {1, 0, -2, 3}) == 2", "countPositive(new int[0]) == 0"],
     ["if (xs[i] > 0) {\n                n++;\n            }\n        }\n        int unusedA = 0;\n"
      "        int unusedB = 0;\n        int unusedC = 0;\n        int unusedD = 0;\n"
      "        int unusedE = 0;\n        int unusedF = 0;\n        int unusedG = 0;\n"
      "        int unusedH = 0;\n        return n;"], ["multi-location"]),
    # Plausible but not the reference.
    ("B07",
     """    static int clampLow(int x, int lo) {
        return x < lo ? x : lo;
    }""",
     """    static int clampLow(int x, int lo) {
        return x < lo ? lo : x;
    }""",
     (2, 2),
     ["clampLow(1, 3) == 3", "clampLow(5, 3) == 5"],
     ["return Math.max(x, lo);", "return lo;"], []),
    ("B08",
     """    static int twice(int n) {
        return n + 2;
    }""",
     """    static int twice(int n) {
        return n * 2;
    }""",
     (2, 2),
     ["twice(3) == 6", "twice(0) == 0", "twice(-4) == -8"],
     ["return n + n;"], []),
    # Garbage.
    ("B09",
     """    static int triple(int n) {
        return n * 2;
    }""",
     """    static int triple(int n) {
        return n * 3;
    }""",
     (2, 2),
     ["triple(2) == 6"],
     ["I think the bug is on this line, multiply by three.", "return n * 2 +;"], []),
    ("B10",
     """    static int lastIndex(int[] xs) {
        return xs.length;
    }""",
     """    static int lastIndex(int[] xs) {
        return xs.length - 1;
    }""",
     (2, 2),
     ["lastIndex(new int[] {4, 5}) == 1"],
     ["return undefinedVariable;", "while (true) {\n        }"], []),
]


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    os.chdir(here)
    shutil.rmtree("projects", ignore_errors=True)
    entries, mock = [], {}
    for bug_id, buggy, fixed, region, tests, outputs, tags in BUGS:
        assert buggy != fixed
        pre = HEADER + HELPER + "\n"
        start = pre.count("\n") + 1
        source = pre + buggy + "\n}\n"
        end = start + buggy.count("\n")
        assert source.split("\n")[start - 1:end] == buggy.split("\n")
        n = buggy.count("\n") + 1
        assert 1 <= region[0] <= region[1] <= n
        os.makedirs(f"projects/{bug_id}")
        with open(f"projects/{bug_id}/Main.java", "w") as f:
            f.write(source)
        with open(f"projects/{bug_id}/tests.txt", "w") as f:
            f.write("\n".join(tests) + "\n")
        entries.append({
            "bug_id": bug_id,
            "project_root": f"projects/{bug_id}",
            "file": "Main.java",
            "span": [start, end],
            "region": list(region),
            "reference": fixed,
            "build_command": "\"$MINIJAVA\" check Main.java",
            "test_command": "\"$MINIJAVA\" test Main.java tests.txt",
            "tags": tags,
        })
        mock[bug_id] = outputs
    with open("manifest.jsonl", "w") as f:
        for e in entries:
            f.write(json.dumps(e) + "\n")
    with open("manifest3.jsonl", "w") as f:
        for e in entries[:3]:
            f.write(json.dumps(e) + "\n")
    with open("mock.json", "w") as f:
        json.dump(mock, f, indent=2)
        f.write("\n")
    with open("mock3.json", "w") as f:
        json.dump({b: mock[b][:1] for b in ["B01", "B02", "B03"]}, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
