#!/usr/bin/env python3
"""Regenerates cases.jsonl: 30 hand-labeled (candidate, reference) pairs.

Keys are assigned by hand per case, not computed: "ast" says whether the two
functions have the same syntax tree once comments and layout are ignored,
"exact" whether they are byte-identical up to line endings.
Run from this directory: python3 make_cases.py
"""
import json

REF_SUM = """int sum(int[] xs) {
    int s = 0;
    for (int x : xs) {
        s += x;
    }
    return s;
}"""

REF_MAX = """static int max(int a, int b) {
    if (a > b) {
        return a;
    }
    return b;
}"""

REF_GREET = """String greet(String name) {
    String prefix = "Hello, ";
    return prefix + name + "!";
}"""

REF_SWAP = """void swap(int[] a, int i, int j) {
    int t = a[i];
    a[i] = a[j];
    a[j] = t;
}"""

REF_INIT = """void init() {
    count = 0;
    total = 0;
    name = null;
}"""

REF_FIND = """int find(List<String> xs, String key) {
    for (int i = 0; i < xs.size(); i++) {
        if (xs.get(i).equals(key)) {
            return i;
        }
    }
    return -1;
}"""

CASES = [
    # formatting-only
    ("fmt-identical", "formatting", REF_SUM, REF_SUM, True, True),
    ("fmt-crlf", "formatting", REF_SUM.replace("\n", "\r\n"), REF_SUM, True, True),
    ("fmt-one-line", "formatting",
     "int sum(int[] xs) { int s = 0; for (int x : xs) { s += x; } return s; }", REF_SUM, True, False),
    ("fmt-tabs", "formatting", REF_MAX.replace("    ", "\t"), REF_MAX, True, False),
    ("fmt-operator-spacing", "formatting",
     'String greet(String name){\n    String prefix="Hello, ";\n    return prefix+name+"!";\n}', REF_GREET, True, False),
    ("fmt-brace-newline", "formatting",
     "void swap(int[] a, int i, int j)\n{\n    int t = a[i];\n    a[i] = a[j];\n    a[j] = t;\n}", REF_SWAP, True, False),
    # comment-only
    ("cmt-line", "comment", REF_INIT.replace("count = 0;", "count = 0; // reset"), REF_INIT, True, False),
    ("cmt-block", "comment", REF_SWAP.replace("int t = a[i];", "/* keep a copy */ int t = a[i];"), REF_SWAP, True, False),
    ("cmt-javadoc", "comment", "/** Largest of two. */\n" + REF_MAX, REF_MAX, True, False),
    ("cmt-removed", "comment", REF_FIND, REF_FIND.replace("return -1;", "return -1; // not found"), True, False),
    ("cmt-commented-out-code", "comment",
     REF_SUM.replace("    return s;", "    // s = s * 2;\n    return s;"), REF_SUM, True, False),
    ("cmt-and-layout", "comment",
     "static int max(int a, int b) { // pick\n  if (a > b) { return a; }\n  /* else */ return b;\n}", REF_MAX, True, False),
    # identifier rename
    ("ren-local", "rename",
     "int sum(int[] xs) {\n    int acc = 0;\n    for (int x : xs) {\n        acc += x;\n    }\n    return acc;\n}",
     REF_SUM, False, False),
    ("ren-param", "rename",
     "static int max(int x, int b) {\n    if (x > b) {\n        return x;\n    }\n    return b;\n}",
     REF_MAX, False, False),
    ("ren-method", "rename", REF_GREET.replace("greet", "hello"), REF_GREET, False, False),
    ("ren-field", "rename", REF_INIT.replace("total", "sum"), REF_INIT, False, False),
    ("ren-loop-var", "rename", REF_FIND.replace("int i", "int k").replace("i <", "k <").replace("i++", "k++")
     .replace("get(i)", "get(k)").replace("return i;", "return k;"), REF_FIND, False, False),
    ("ren-type", "rename", REF_FIND.replace("List<String>", "ArrayList<String>"), REF_FIND, False, False),
    # literal change
    ("lit-int", "literal", REF_INIT.replace("count = 0;", "count = 1;"), REF_INIT, False, False),
    ("lit-string", "literal", REF_GREET.replace('"Hello, "', '"Hi, "'), REF_GREET, False, False),
    ("lit-string-spacing", "literal", REF_GREET.replace('"Hello, "', '"Hello,  "'), REF_GREET, False, False),
    ("lit-negative", "literal", REF_FIND.replace("return -1;", "return -2;"), REF_FIND, False, False),
    ("lit-null-vs-empty", "literal", REF_INIT.replace("name = null;", 'name = "";'), REF_INIT, False, False),
    ("lit-hex", "literal", REF_INIT.replace("count = 0;", "count = 0x0;"), REF_INIT, False, False),
    # statement reorder
    ("ord-assignments", "reorder", REF_INIT.replace("count = 0;\n    total = 0;", "total = 0;\n    count = 0;"),
     REF_INIT, False, False),
    ("ord-swap-broken", "reorder", REF_SWAP.replace("a[i] = a[j];\n    a[j] = t;", "a[j] = t;\n    a[i] = a[j];"),
     REF_SWAP, False, False),
    ("ord-if-return", "reorder", "static int max(int a, int b) {\n    if (a <= b) {\n        return b;\n    }\n    return a;\n}",
     REF_MAX, False, False),
    ("ord-operands", "reorder", REF_GREET.replace('prefix + name + "!"', 'name + prefix + "!"'), REF_GREET, False, False),
    ("ord-decl-after-use", "reorder",
     "String greet(String name) {\n    return prefix + name + \"!\";\n    String prefix = \"Hello, \";\n}", REF_GREET, False, False),
    ("ord-condition", "reorder", REF_FIND.replace("xs.get(i).equals(key)", "key.equals(xs.get(i))"), REF_FIND, False, False),
]


def main():
    assert len(CASES) == 30
    assert len({c[0] for c in CASES}) == 30
    with open("cases.jsonl", "w") as f:
        for cid, cat, cand, ref, ast, exact in CASES:
            assert (cand == ref) or not exact or cand.replace("\r\n", "\n") == ref
            f.write(json.dumps({"id": cid, "category": cat, "candidate": cand, "reference": ref,
                                "ast": ast, "exact": exact}) + "\n")


if __name__ == "__main__":
    main()
