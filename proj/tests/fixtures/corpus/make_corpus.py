#!/usr/bin/env python3
"""Regenerates the 20-diff Megadiff-layout fixture under megadiff/.

Layout per diff: megadiff/<id>.diff, megadiff/<id>/before/<path> and, for some
ids, megadiff/<id>/after/<path>. Expected outcomes are listed in EXPECTED and
in README.md; they are counted by hand, not computed.
Run from this directory: python3 make_corpus.py
"""
import os
import shutil
import subprocess

OUT = "megadiff"

CALC = """package demo;

public class Calculator {
    private int last;

    public int add(int a, int b) {
        last = a - b;
        return last;
    }

    public int mul(int a, int b) {
        last = a * b;
        return last;
    }
}
"""

STRUTIL = """package demo.text;

public final class StringUtils {
    private StringUtils() {
    }

    public static boolean isBlank(String s) {
        if (s == null) {
            return true;
        }
        return s.length() == 0;
    }

    public static String trimToNull(String s) {
        String t = s.trim();
        return t.isEmpty() ? null : t;
    }
}
"""

ARRAYS = """package demo;

public class ArrayUtils {
    public static int indexOf(int[] xs, int x) {
        for (int i = 0; i <= xs.length; i++) {
            if (xs[i] == x) {
                return i;
            }
        }
        return -1;
    }
}
"""

COUNTER = """package demo;

public class Counter {
    private int count;

    public void increment() {
        count += 2;
    }

    public int get() {
        return count;
    }
}
"""

PARSER = """package demo;

public class Parser {
    public int parseInt(String s) {
        int value = 0;
        for (char c : s.toCharArray()) {
            value = value * 10 + c;
        }
        return value;
    }
}
"""

NAMES = """package demo;

import java.util.List;

public class Names {
    public String first(List<String> names) {
        return names.get(0);
    }
}
"""

LOG = """package demo;

public class Log {
    public void write(String msg) {
        System.out.println("debug: " + msg);
        System.out.println(msg);
    }
}
"""

LEAKY = """package demo;

public class Leaky {
    public double pivot(double[] col) {
        double best = col[0];
        for (int i = 1; i < col.length; i++) {
            if (col[i] > best) {
                best = col[i];
            }
        }
        return best;
    }
}
"""


def big_class():
    body = ["    public int huge(int x) {", "        int acc = 0;"]
    for i in range(200):
        body.append(f"        acc += compute(x, {i}) * weight[{i % 7}];")
    body += ["        return acc;", "    }"]
    return "package demo;\n\npublic class Big {\n" + "\n".join(body) + "\n}\n"


BIG = big_class()

ACCOUNT = """package demo;

public class Account {
    private long balance;
    private final String owner;

    public Account(String owner) {
        this.owner = null;
    }

    public boolean withdraw(long amount) {
        if (amount < 0) {
            throw new IllegalArgumentException("negative");
        }
        long fee = amount / 100;
        long total = amount + fee;
        log("withdraw " + amount);
        log("fee " + fee);
        audit(owner, amount);
        audit(owner, fee);
        notifyListeners();
        validate();
        if (total > balance) {
            return false;
        }
        balance -= amount;
        return true;
    }

    private void log(String s) {
    }

    private void audit(String o, long a) {
    }

    private void notifyListeners() {
    }

    private void validate() {
    }
}
"""

SHAPES = """package demo;

public class Shapes {
    public double area(double r) {
        return 3.14 * r;
    }

    public double perimeter(double r) {
        return 3.14 * r;
    }

    public double volume(double r) {
        return 4.0 / 3.0 * 3.14 * r * r * r;
    }
}
"""

CONFIG = """package demo;

public class Config {
    private int retries = 1;

    public int retries() {
        return retries;
    }
}
"""

BROKEN_DIFF = """This is not a patch.
It mentions a file but has no unified diff structure.
"""

# id -> list of (path, before, after); a missing after means the file is unchanged.
DIFFS = {}
AFTER_DIR = set()


def edit(s, old, new, count=1):
    assert s.count(old) >= count, (old, s)
    return s.replace(old, new, count)


def add_diff(did, files, with_after=False):
    DIFFS[did] = files
    if with_after:
        AFTER_DIR.add(did)


# Valid single-function changes.
add_diff("d01", [("src/demo/Calculator.java", CALC, edit(CALC, "last = a - b;", "last = a + b;"))])
add_diff("d02", [("src/demo/text/StringUtils.java", STRUTIL, edit(STRUTIL, "return s.length() == 0;", "return s.trim().length() == 0;"))])
add_diff("d03", [("src/demo/ArrayUtils.java", ARRAYS, edit(ARRAYS, "i <= xs.length", "i < xs.length"))], with_after=True)
add_diff("d04", [("src/demo/Counter.java", COUNTER, edit(COUNTER, "count += 2;", "count++;"))])
add_diff("d05", [("src/demo/Parser.java", PARSER, edit(PARSER, "        for (char c : s.toCharArray()) {\n            value = value * 10 + c;\n",
                                                       "        for (char c : s.toCharArray()) {\n            if (c < '0' || c > '9') {\n                throw new NumberFormatException(s);\n            }\n            value = value * 10 + (c - '0');\n"))], with_after=True)
add_diff("d06", [("src/demo/Names.java", NAMES, edit(NAMES, "        return names.get(0);\n", "        if (names.isEmpty()) {\n            return null;\n        }\n        return names.get(0);\n"))])
add_diff("d07", [("src/demo/Log.java", LOG, edit(LOG, "        System.out.println(\"debug: \" + msg);\n", ""))])
# Same file and change as d01.
add_diff("d08", [("src/demo/Calculator.java", CALC, edit(CALC, "last = a - b;", "last = a + b;"))])
# Same change as d02 in a different file path.
add_diff("d09", [("lib/other/StringUtils.java", STRUTIL, edit(STRUTIL, "return s.length() == 0;", "return s.trim().length() == 0;"))])
# Fixed function is on the test denylist.
add_diff("d10", [("src/demo/Leaky.java", LEAKY, edit(LEAKY, "if (col[i] > best) {", "if (Math.abs(col[i]) > Math.abs(best)) {"))])
# Single function far over the token cap.
add_diff("d11", [("src/demo/Big.java", BIG, edit(BIG, "int acc = 0;", "int acc = 1;"))])
# Multi-location fix: edit sites 12 lines apart.
add_diff("d12", [("src/demo/Account.java", ACCOUNT, edit(edit(ACCOUNT, "if (amount < 0) {", "if (amount <= 0) {"), "balance -= amount;", "balance -= total;"))])
# Constructor fix.
add_diff("d13", [("src/demo/Account.java", ACCOUNT, edit(ACCOUNT, "this.owner = null;", "this.owner = owner;"))])

# Two functions changed.
add_diff("d14", [("src/demo/Shapes.java", SHAPES, edit(edit(SHAPES, "return 3.14 * r;", "return 3.14 * r * r;"), "return 3.14 * r;", "return 2 * 3.14 * r;"))])
add_diff("d15", [("src/demo/Calculator.java", CALC, edit(edit(CALC, "last = a - b;", "last = a + b;"), "last = a * b;", "last = Math.multiplyExact(a, b);"))])
add_diff("d16", [("src/demo/text/StringUtils.java", STRUTIL, edit(edit(STRUTIL, "return s.length() == 0;", "return s.isBlank();"), "String t = s.trim();", "String t = s == null ? \"\" : s.trim();"))])

# Two files touched.
add_diff("d17", [("src/demo/Counter.java", COUNTER, edit(COUNTER, "count += 2;", "count++;")),
                 ("src/demo/Log.java", LOG, edit(LOG, "System.out.println(msg);", "System.err.println(msg);"))], with_after=True)
add_diff("d18", [("src/demo/Names.java", NAMES, edit(NAMES, "names.get(0)", "names.get(names.size() - 1)")),
                 ("src/demo/Parser.java", PARSER, edit(PARSER, "int value = 0;", "long value = 0;"))])

# Field initializer only; no function body changes.
add_diff("d19", [("src/demo/Config.java", CONFIG, edit(CONFIG, "private int retries = 1;", "private int retries = 3;"))])

# Unparsable diff file.
DIFFS["d20"] = None

EXPECTED = {
    "d01": "pair", "d02": "pair", "d03": "pair", "d04": "pair", "d05": "pair",
    "d06": "pair", "d07": "pair", "d08": "pair (duplicate of d01)",
    "d09": "pair (duplicate of d02, other path)", "d10": "pair (denylisted)",
    "d11": "pair (over token cap)", "d12": "pair (multi-location)", "d13": "pair (constructor)",
    "d14": "multiple-functions", "d15": "multiple-functions", "d16": "multiple-functions",
    "d17": "multiple-files", "d18": "multiple-files", "d19": "no-function-change",
    "d20": "parse-failure",
}


def unified(path, before, after):
    tmp = "_tmp"
    os.makedirs(tmp, exist_ok=True)
    with open(f"{tmp}/a", "w") as f:
        f.write(before)
    with open(f"{tmp}/b", "w") as f:
        f.write(after)
    r = subprocess.run(["diff", "-u", "--label", f"a/{path}", "--label", f"b/{path}", f"{tmp}/a", f"{tmp}/b"],
                       capture_output=True, text=True)
    shutil.rmtree(tmp)
    assert r.returncode == 1, path
    return r.stdout


def write(path, content):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        f.write(content)


def main():
    shutil.rmtree(OUT, ignore_errors=True)
    os.makedirs(OUT)
    for did, files in sorted(DIFFS.items()):
        if files is None:
            write(f"{OUT}/{did}.diff", BROKEN_DIFF)
            continue
        patch = ""
        for path, before, after in files:
            patch += f"diff -u a/{path} b/{path}\n" + unified(path, before, after)
            write(f"{OUT}/{did}/before/{path}", before)
            if did in AFTER_DIR:
                write(f"{OUT}/{did}/after/{path}", after)
        write(f"{OUT}/{did}.diff", patch)
    assert len(EXPECTED) == 20 == len(DIFFS)


if __name__ == "__main__":
    main()
