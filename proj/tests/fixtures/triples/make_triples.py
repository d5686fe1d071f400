#!/usr/bin/env python3
"""Regenerates triples.jsonl: (buggy, fixed, region) fixtures for round-trip tests.

Each triple is a base function plus a hand-written edit. Regions are the
minimal cover of the edit unless a wider region is given explicitly.
Run from this directory: python3 make_triples.py > triples.jsonl
"""
import json

BASES = {}

BASES["clamp"] = """\
public static int clamp(int value, int lo, int hi) {
    if (value < lo) {
        return lo;
    }
    if (value > hi) {
        return hi;
    }
    return value;
}"""

BASES["sum"] = """\
static long sum(int[] xs) {
  long total = 0;
  for (int i = 0; i < xs.length; i++) {
    total += xs[i];
  }
  return total;
}"""

BASES["addOrUpdate"] = """\
public XYDataItem addOrUpdate(Number x, Number y) {
    if (x == null) {
        throw new IllegalArgumentException("Null 'x' argument.");
    }
    XYDataItem overwritten = null;
    int index = indexOf(x);
    if (index >= 0 && !this.allowDuplicateXValues) {
        XYDataItem existing = (XYDataItem) this.data.get(index);
        try {
            overwritten = (XYDataItem) existing.clone();
        }
        catch (CloneNotSupportedException e) {
            throw new SeriesException("Couldn't clone XYDataItem!");
        }
        existing.setY(y);
    }
    else {
        if (this.autoSort) {
            this.data.add(-index - 1, new XYDataItem(x, y));
        }
        else {
            this.data.add(new XYDataItem(x, y));
        }
        if (getItemCount() > this.maximumItemCount) {
            this.data.remove(0);
        }
    }
    fireSeriesChanged();
    return overwritten;
}"""

BASES["mayBeString"] = """\
static boolean mayBeString(Node n, boolean recurse) {
  if (recurse) {
    return allResultsMatch(n, MAY_BE_STRING_PREDICATE);
  } else {
    return mayBeStringHelper(n);
  }
}"""

BASES["gcd"] = """\
\tint gcd(int a, int b) {
\t\twhile (b != 0) {
\t\t\tint t = b;
\t\t\tb = a % b;
\t\t\ta = t;
\t\t}
\t\treturn a;
\t}"""

BASES["indexOf"] = """\
    private int indexOf(String needle, String[] hay) {
        if (hay == null) {
            return -1;
        }

        for (int i = 0; i <= hay.length; i++) {
            if (hay[i].equals(needle)) {
                return i;
            }
        }
        return -1;
    }"""

BASES["parse"] = """\
public Fraction parse(String source, ParsePosition pos) {
    int initialIndex = pos.getIndex();
    parseAndIgnoreWhitespace(source, pos);
    Number num = getNumeratorFormat().parse(source, pos);
    if (num == null) {
        pos.setIndex(initialIndex);
        return null;
    }
    int startIndex = pos.getIndex();
    char c = parseNextCharacter(source, pos);
    switch (c) {
    case 0 :
        return new Fraction(num.intValue(), 1);
    case '/' :
        break;
    default :
        pos.setIndex(initialIndex);
        pos.setErrorIndex(startIndex);
        return null;
    }
    parseAndIgnoreWhitespace(source, pos);
    Number den = getDenominatorFormat().parse(source, pos);
    if (den == null) {
        pos.setIndex(initialIndex);
        return null;
    }
    return new Fraction(num.intValue(), den.intValue());
}"""

BASES["toString"] = """\
@Override
public String toString() {
    StringBuilder sb = new StringBuilder();
    sb.append('[');
    for (int i = 0; i < size; i++) {
        if (i > 0) sb.append(", ");
        sb.append(items[i]);
    }
    sb.append(']');
    return sb.toString();
}"""

BASES["Point"] = """\
  public Point(int x, int y) {
    this.x = x;
    this.y = x;
  }"""

BASES["isPrime"] = """\
static boolean isPrime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d < n; d++)
        if (n % d == 0) return false;
    return true;
}"""

BASES["reverse"] = """\
public static String reverse(String s) {
    char[] cs = s.toCharArray();
    int i = 0, j = cs.length;
    while (i < j) {
        char t = cs[i];
        cs[i] = cs[j];
        cs[j] = t;
        i++;
        j--;
    }
    return new String(cs);
}"""

BASES["lambda"] = """\
public List<String> names(List<Person> people) {
    return people.stream()
        .filter(p -> p.age() > 18)
        .map(Person::name)
        .sorted()
        .collect(Collectors.toList());
}"""

BASES["single"] = "int one() { return 2; }"


def lines(name):
    return BASES[name].split("\n")


def replace(name, edits):
    """edits: {1-based line: new text or None (delete) or list (replace by many)}"""
    out = []
    for i, line in enumerate(lines(name), start=1):
        if i in edits:
            e = edits[i]
            if e is None:
                continue
            if isinstance(e, list):
                out.extend(e)
            else:
                out.append(e)
        else:
            out.append(line)
    return "\n".join(out)


def insert(name, before, new_lines):
    ls = lines(name)
    return "\n".join(ls[: before - 1] + new_lines + ls[before - 1 :])


def minimal_region(buggy, fixed):
    b, f = buggy.split("\n"), fixed.split("\n")
    p = 0
    while p < min(len(b), len(f)) and b[p] == f[p]:
        p += 1
    s = 0
    while s < min(len(b), len(f)) - p and b[-1 - s] == f[-1 - s]:
        s += 1
    return [p + 1, len(b) - s]


TRIPLES = []


def add(tid, base, fixed, region=None, tags=()):
    buggy = BASES[base]
    assert buggy != fixed, tid
    TRIPLES.append(
        {
            "id": tid,
            "buggy": buggy,
            "fixed": fixed,
            "region": region or minimal_region(buggy, fixed),
            "tags": list(tags),
        }
    )


# Single-line changes.
add("clamp-op", "clamp", replace("clamp", {2: "    if (value <= lo) {"}))
add("clamp-ret", "clamp", replace("clamp", {6: "        return hi - 1;"}))
add("clamp-last", "clamp", replace("clamp", {8: "    return value; // unchanged"}))
add("clamp-sig", "clamp", replace("clamp", {1: "public static int clamp(long value, int lo, int hi) {"}))
add("clamp-closing", "clamp", replace("clamp", {9: "} // clamp"}))
add("sum-bound", "sum", replace("sum", {3: "  for (int i = 1; i < xs.length; i++) {"}))
add("sum-init", "sum", replace("sum", {2: "  long total = 1;"}))
add("mayBeString", "mayBeString", replace("mayBeString", {3: "    return anyResultsMatch(n, MAY_BE_STRING_PREDICATE);"}))
add("gcd-tabs", "gcd", replace("gcd", {4: "\t\t\tb = a - b;"}))
add("indexOf-bound", "indexOf", replace("indexOf", {6: "        for (int i = 0; i < hay.length; i++) {"}))
add("indexOf-null", "indexOf", replace("indexOf", {7: "            if (needle.equals(hay[i])) {"}))
add("point-field", "Point", replace("Point", {3: "    this.y = y;"}))
add("prime-bound", "isPrime", replace("isPrime", {3: "    for (int d = 2; d * d <= n; d++)"}))
add("reverse-bound", "reverse", replace("reverse", {3: "    int i = 0, j = cs.length - 1;"}))
add("lambda-filter", "lambda", replace("lambda", {3: "        .filter(p -> p.age() >= 18)"}))
add("single-line", "single", "int one() { return 1; }")
add("toString-sep", "toString", replace("toString", {6: "        if (i > 0) sb.append(\",\");"}))

# Indentation-only and whitespace changes.
add("clamp-indent", "clamp", replace("clamp", {3: "      return lo;"}))
add("sum-dedent", "sum", replace("sum", {4: "  total += xs[i];"}))
add("gcd-mixed-ws", "gcd", replace("gcd", {5: "\t\t\ta  =  t;"}))

# Multi-line replacements.
add("clamp-both", "clamp", replace("clamp", {2: "    if (value < lo || lo > hi) {", 3: "        return Math.min(lo, hi);"}))
add("sum-stream", "sum", replace("sum", {2: "  long total = java.util.Arrays.stream(xs).asLongStream().sum();", 3: None, 4: None, 5: None}))
add("reverse-body", "reverse", replace("reverse", {3: "    int i = 0, j = cs.length - 1;", 4: "    for (; i < j; i++, j--) {", 8: None, 9: None}))
add("parse-switch", "parse", replace("parse", {12: "    case 0 :", 13: ["        return new Fraction(num.intValue(), 1);", "    case ' ' :", "        return new Fraction(num.intValue(), 1);"]}))
add("toString-loop", "toString", replace("toString", {5: "    for (int i = 0; i < size; ++i) {", 6: ["        if (i > 0) {", "            sb.append(\", \");", "        }"]}))
add("lambda-chain", "lambda", replace("lambda", {4: "        .map(p -> p.name().trim())", 5: "        .distinct()"}))

# Insertions (empty minimal region).
add("clamp-guard", "clamp", insert("clamp", 2, ["    if (lo > hi) {", "        throw new IllegalArgumentException();", "    }"]))
add("sum-null", "sum", insert("sum", 2, ["  if (xs == null) return 0;"]))
add("indexOf-blank", "indexOf", insert("indexOf", 11, ["        // not found"]))
add("prime-two", "isPrime", insert("isPrime", 3, ["    if (n == 2) return true;"]))
add("point-validate", "Point", insert("Point", 2, ["    checkRange(x, y);"]))
add("addOrUpdate-null-y", "addOrUpdate", insert("addOrUpdate", 5, ["    if (y == null) {", "        y = Double.NaN;", "    }"]))

# Deletions.
add("clamp-drop", "clamp", replace("clamp", {5: None, 6: None, 7: None}))
add("toString-drop", "toString", replace("toString", {1: None}))
add("indexOf-drop-blank", "indexOf", replace("indexOf", {5: None}))
add("reverse-drop", "reverse", replace("reverse", {9: None}))

# Widened regions (suspicious span larger than the change).
add("clamp-wide", "clamp", replace("clamp", {3: "        return lo + 0;"}), region=[2, 7])
add("sum-wide", "sum", replace("sum", {4: "    total += (long) xs[i];"}), region=[3, 5])
add("gcd-wide", "gcd", replace("gcd", {4: "\t\t\tb = a % t;"}), region=[2, 6])
add("parse-wide", "parse", replace("parse", {21: "    parseAndIgnoreWhitespace(source, pos); // den"}), region=[20, 26])
add("addOrUpdate-wide", "addOrUpdate", replace("addOrUpdate", {25: "            this.data.remove(0); // oldest"}), region=[18, 27])
add("lambda-wide", "lambda", replace("lambda", {5: "        .sorted(Comparator.naturalOrder())"}), region=[2, 6])
add("whole-function", "isPrime", replace("isPrime", {2: "    if (n <= 1) return false;"}), region=[1, 6])
add("insert-in-wide", "Point", insert("Point", 3, ["    validate();"]), region=[2, 3])

# Region touching blank lines.
add("indexOf-blank-edit", "indexOf", replace("indexOf", {5: "        int n = hay.length;", 6: "        for (int i = 0; i < n; i++) {"}))
add("indexOf-blank-inside", "indexOf", replace("indexOf", {6: "        for (int i = 0; i < hay.length; ++i) {"}), region=[4, 6])

# Multi-location: edit sites separated by at least ten unchanged lines.
ML = ("multi-location",)
add("addOrUpdate-ml", "addOrUpdate",
    replace("addOrUpdate", {2: "    if (x == null || y == null) {", 19: "            this.data.add(-index - 1, new XYDataItem(x, y, true));"}), tags=ML)
add("addOrUpdate-ml2", "addOrUpdate",
    replace("addOrUpdate", {7: "    if (index >= 0 && this.allowDuplicateXValues == false) {", 24: "        if (getItemCount() >= this.maximumItemCount) {"}), tags=ML)
add("addOrUpdate-ml3", "addOrUpdate",
    replace("addOrUpdate", {3: "        throw new IllegalArgumentException(\"Null 'x'.\");", 15: None, 28: "    fireSeriesChanged(true);"}), tags=ML)
add("parse-ml", "parse",
    replace("parse", {5: "        pos.setErrorIndex(initialIndex);", 23: "    if (den == null || den.intValue() == 0) {"}), tags=ML)
add("parse-ml2", "parse",
    replace("parse", {4: "    Number num = getWholeFormat().parse(source, pos);", 27: "    return new Fraction(num.intValue(), den.intValue(), true);"}), tags=ML)
add("parse-ml-insert", "parse",
    replace("parse", {2: "    final int initialIndex = pos.getIndex();", 26: ["    }", "    checkDenominator(den);"]}), tags=ML)
add("addOrUpdate-ml-delete", "addOrUpdate",
    replace("addOrUpdate", {5: None, 29: "    return null;"}), tags=ML)

# Small functions at the edges.
add("point-first", "Point", replace("Point", {1: "  public Point(int x, int y, int z) {"}))
add("point-all", "Point", "  public Point(int x, int y) {\n    super(x, y);\n  }")
add("single-to-multi", "single", "int one() {\n  return 1;\n}")


if __name__ == "__main__":
    for t in TRIPLES:
        print(json.dumps(t, sort_keys=True))
