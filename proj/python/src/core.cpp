#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aprkit/assess.hpp"
#include "aprkit/corpus.hpp"
#include "aprkit/diff.hpp"
#include "aprkit/repr.hpp"
#include "aprkit/syntax.hpp"

namespace py = pybind11;
using namespace aprkit;

namespace {

using RegionTuple = std::pair<int, int>;

repr::Region to_region(const RegionTuple& r) { return {r.first, r.second}; }

repr::ReprPair to_pair(const std::string& s) {
  auto p = repr::ReprPair::parse(s);
  if (!p) throw repr::InvalidPair("cannot parse representation pair: " + s);
  return *p;
}

repr::InputKind to_input(const std::string& s) {
  auto k = repr::parse_input_kind(s);
  if (!k) throw Error("unknown input representation: " + s);
  return *k;
}

repr::OutputKind to_output(const std::string& s) {
  auto k = repr::parse_output_kind(s);
  if (!k) throw Error("unknown output representation: " + s);
  return *k;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Program-repair toolkit core";

  auto base = py::register_exception<Error>(m, "AprkitError", PyExc_ValueError);
  py::register_exception<repr::InvalidPair>(m, "InvalidPair", base.ptr());
  py::register_exception<repr::InvalidRegion>(m, "InvalidRegion", base.ptr());
  py::register_exception<repr::MalformedOutput>(m, "MalformedOutput", base.ptr());
  py::register_exception<diff::HunkApplyFailure>(m, "HunkApplyFailure", base.ptr());
  py::register_exception<syntax::ParseError>(m, "ParseError", base.ptr());

  m.def("valid_pair", [](const std::string& pair) {
    auto p = repr::ReprPair::parse(pair);
    return p && repr::valid_pair(*p);
  }, py::arg("pair"));
  m.def("valid_pairs", [] {
    std::vector<std::string> out;
    for (const auto& p : repr::all_valid_pairs()) out.push_back(p.to_string());
    return out;
  });

  m.def("extract_functions", [](const std::string& source, const std::string& path) {
    std::vector<py::dict> out;
    for (const auto& fn : syntax::extract_functions({path, source})) {
      py::dict d;
      d["name"] = fn.name;
      d["start_line"] = fn.start_line;
      d["end_line"] = fn.end_line;
      d["text"] = fn.text;
      out.push_back(d);
    }
    return out;
  }, py::arg("source"), py::arg("path") = "");

  m.def("build_input", [](const std::string& function, const RegionTuple& region,
                          const std::string& kind) {
    return repr::build_input(syntax::function_from_text(function), to_region(region),
                             to_input(kind));
  }, py::arg("function"), py::arg("region"), py::arg("kind"));
  m.def("build_output", [](const std::string& buggy, const std::string& fixed,
                           const RegionTuple& region, const std::string& kind) {
    return repr::build_output(syntax::function_from_text(buggy), syntax::function_from_text(fixed),
                              to_region(region), to_output(kind));
  }, py::arg("buggy"), py::arg("fixed"), py::arg("region"), py::arg("kind"));
  m.def("reconstruct", [](const std::string& function, const RegionTuple& region,
                          const std::string& pair, const std::string& output) {
    return repr::reconstruct(syntax::function_from_text(function), to_region(region),
                             to_pair(pair), output);
  }, py::arg("function"), py::arg("region"), py::arg("pair"), py::arg("output"));
  m.def("enumerate_regions", [](const std::string& function) {
    std::vector<RegionTuple> out;
    for (const auto& r : repr::enumerate_regions(syntax::function_from_text(function)))
      out.emplace_back(r.start_line, r.end_line);
    return out;
  }, py::arg("function"));
  m.def("derive_region", [](const std::string& buggy, const std::string& fixed) {
    auto r = repr::derive_region(buggy, fixed);
    return RegionTuple{r.start_line, r.end_line};
  }, py::arg("buggy"), py::arg("fixed"));

  m.def("make_diff", [](const std::string& a, const std::string& b, int context) {
    return diff::make_unified_diff(a, b, context).to_string();
  }, py::arg("a"), py::arg("b"), py::arg("context") = 3);
  m.def("apply_diff", [](const std::string& patch, const std::string& a, int fuzz) {
    return diff::apply_diff(diff::UnifiedDiff::parse(patch), a, fuzz);
  }, py::arg("patch"), py::arg("a"), py::arg("fuzz") = 3);

  m.def("exact_match", &assess::exact_match, py::arg("candidate"), py::arg("reference"));
  m.def("ast_match", [](const std::string& candidate, const std::string& reference) {
    switch (assess::ast_match(candidate, reference)) {
      case assess::AstResult::match: return "match";
      case assess::AstResult::no_match: return "no-match";
      default: return "parse-failure";
    }
  }, py::arg("candidate"), py::arg("reference"));

  m.def("cohen_kappa", [](const std::vector<std::tuple<std::string, std::size_t, std::string,
                                                      std::string>>& ratings,
                          const std::string& rater_a, const std::string& rater_b) {
    assess::RatingStore store;
    for (const auto& [bug, rank, rater, label] : ratings)
      store.record({bug, rank, rater, assess::parse_label(label), assess::Round::first, "-"});
    auto k = assess::cohen_kappa(store, rater_a, rater_b);
    py::dict d;
    d["kappa"] = k.kappa;
    d["observed"] = k.observed;
    d["expected"] = k.expected;
    d["items"] = k.items;
    return d;
  }, py::arg("ratings"), py::arg("rater_a"), py::arg("rater_b"),
     "ratings: (bug_id, rank, rater, 'correct' | 'incorrect') tuples");

  m.def("count_tokens", [](const std::string& text, const std::string& tokenizer) {
    return corpus::count_tokens(text, tokenizer);
  }, py::arg("text"), py::arg("tokenizer") = "approximate");
  m.def("render_training_config", [](std::optional<std::string> pair) {
    std::optional<repr::ReprPair> p;
    if (pair) p = to_pair(*pair);
    return corpus::render_training_config({}, p);
  }, py::arg("pair") = py::none());
}
