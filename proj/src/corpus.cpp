#include "aprkit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "aprkit/diff.hpp"
#include "aprkit/parallel.hpp"
#include "aprkit/process.hpp"
#include "aprkit/text.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace aprkit::corpus {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct Keyed {
  std::string key;
  syntax::FunctionSpan span;
  std::string text;
};

// Functions keyed by name, parameter list and ordinal among equal keys, so
// overloads and same-named methods in nested classes stay distinct.
std::vector<Keyed> keyed_functions(const syntax::SourceFile& file,
                                   const std::vector<std::string>& lines) {
  const auto& fe = syntax::frontend_for(file.language);
  auto tree = fe.parse(file.content);
  std::map<std::string, int> seen;
  std::vector<Keyed> out;
  for (auto& span : fe.functions(tree, file.content)) {
    auto base = span.name + "(" + span.signature + ")";
    auto key = base + "#" + std::to_string(seen[base]++);
    auto text = text::join_lines(lines, static_cast<std::size_t>(span.start_line - 1),
                                 static_cast<std::size_t>(span.end_line));
    out.push_back({std::move(key), std::move(span), std::move(text)});
  }
  return out;
}

// File lines with every function body collapsed to a placeholder.
std::vector<std::string> skeleton(const std::vector<std::string>& lines,
                                  const std::vector<Keyed>& fns) {
  std::vector<std::string> out;
  std::size_t i = 0;
  for (const auto& f : fns) {
    auto start = static_cast<std::size_t>(f.span.start_line - 1);
    if (start < i) continue;
    out.insert(out.end(), lines.begin() + static_cast<long>(i),
               lines.begin() + static_cast<long>(start));
    out.push_back("\x01" + f.key);
    i = static_cast<std::size_t>(f.span.end_line);
  }
  out.insert(out.end(), lines.begin() + static_cast<long>(std::min(i, lines.size())),
             lines.end());
  return out;
}

std::string rel(const fs::path& p, const fs::path& root) {
  return fs::relative(p, root).generic_string();
}

bool ends_with(std::string_view s, std::string_view suffix) { return s.ends_with(suffix); }

DiffResult reject(std::string provenance, Outcome o, std::string detail) {
  return {std::move(provenance), o, std::move(detail), std::nullopt};
}

DiffResult scan_megadiff_entry(const fs::path& root, const fs::path& diff_path,
                               const std::string& language) {
  auto provenance = rel(diff_path, root);
  auto base = diff_path.parent_path() / diff_path.stem();
  auto id = rel(base, root);
  std::vector<diff::FilePatch> patches;
  try {
    patches = diff::parse_patch_set(text::read_file(diff_path.string()));
  } catch (const Error& e) {
    return reject(provenance, Outcome::parse_failure, e.what());
  }
  if (patches.empty()) return reject(provenance, Outcome::parse_failure, "no file sections");
  if (patches.size() > 1)
    return reject(provenance, Outcome::multiple_files,
                  std::to_string(patches.size()) + " files changed");
  const auto& fp = patches.front();
  if (fp.old_path == "/dev/null" || fp.new_path == "/dev/null")
    return reject(provenance, Outcome::function_added_or_removed, "file added or removed");

  auto before_path = base / "before" / fp.old_path;
  auto after_path = base / "after" / fp.new_path;
  if (!fs::is_regular_file(before_path))
    return reject(provenance, Outcome::missing_source, "missing " + rel(before_path, root));
  syntax::SourceFile before{fp.old_path, text::read_file(before_path.string()), language};
  syntax::SourceFile after{fp.new_path, {}, language};
  if (fs::is_regular_file(after_path)) {
    after.content = text::read_file(after_path.string());
  } else {
    try {
      after.content = diff::apply_diff(fp.diff, before.content);
    } catch (const Error& e) {
      return reject(provenance, Outcome::parse_failure, e.what());
    }
  }
  return pair_from_revisions(before, after, id, provenance);
}

DiffResult scan_file_pair(const fs::path& root, const fs::path& before_path,
                          const std::string& language) {
  auto name = before_path.filename().string();
  auto ext = before_path.extension().string();
  auto stem = name.substr(0, name.size() - ext.size() - std::string("_before").size());
  auto after_path = before_path.parent_path() / (stem + "_after" + ext);
  auto provenance = rel(before_path, root);
  auto id = rel(before_path.parent_path() / stem, root);
  if (!fs::is_regular_file(after_path))
    return reject(provenance, Outcome::missing_source, "missing " + rel(after_path, root));
  syntax::SourceFile before{stem + ext, text::read_file(before_path.string()), language};
  syntax::SourceFile after{stem + ext, text::read_file(after_path.string()), language};
  return pair_from_revisions(before, after, id, provenance);
}

std::string trimmed_lines(std::string_view s) {
  std::string out;
  for (const auto& l : text::split_lines(s)) {
    out += text::rtrim(l);
    out += '\n';
  }
  return out;
}

bool is_word(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$'; }
bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::size_t approximate_tokens(std::string_view s) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    if (is_word(c)) {
      while (i < s.size() && is_word(static_cast<unsigned char>(s[i]))) ++i;
    } else if (is_space(c)) {
      while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
    } else if (c >= 0x80) {
      // One token per UTF-8 code point.
      ++i;
      while (i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) ++i;
    } else {
      ++i;
    }
    ++n;
  }
  return n;
}

constexpr std::string_view kExternalPrefix = "external:";

std::size_t external_tokens(std::string_view s, std::string_view command) {
  process::Options o;
  o.command = std::string(command);
  o.input = std::string(s);
  o.timeout = std::chrono::seconds(60);
  auto r = process::run_shell(o);
  if (!r.ok())
    throw TokenizerFailure("tokenizer command failed (exit " + std::to_string(r.exit_code) +
                           "): " + std::string(text::trim(r.output)).substr(0, 200));
  auto t = text::trim(r.output);
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw TokenizerFailure("tokenizer printed '" + std::string(t.substr(0, 60)) +
                           "', expected a count");
  return n;
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::pair: return "pair";
    case Outcome::parse_failure: return "parse-failure";
    case Outcome::missing_source: return "missing-source";
    case Outcome::multiple_files: return "multiple-files";
    case Outcome::multiple_functions: return "multiple-functions";
    case Outcome::no_function_change: return "no-function-change";
    case Outcome::change_outside_function: return "change-outside-function";
    case Outcome::function_added_or_removed: return "function-added-or-removed";
  }
  return "?";
}

Layout detect_layout(const std::string& root) {
  if (!fs::is_directory(root)) throw Error("corpus root is not a directory: " + root);
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    auto ext = e.path().extension();
    if (ext == ".diff" || ext == ".patch") return Layout::megadiff;
  }
  return Layout::file_pairs;
}

DiffResult pair_from_revisions(const syntax::SourceFile& before, const syntax::SourceFile& after,
                               std::string id, std::string provenance) {
  auto before_lines = text::split_lines(before.content);
  auto after_lines = text::split_lines(after.content);
  std::vector<Keyed> bf;
  std::vector<Keyed> af;
  try {
    bf = keyed_functions(before, before_lines);
    af = keyed_functions(after, after_lines);
  } catch (const syntax::ParseError& e) {
    return reject(provenance, Outcome::parse_failure, e.what());
  }

  std::set<std::string> bkeys, akeys;
  for (const auto& f : bf) bkeys.insert(f.key);
  for (const auto& f : af) akeys.insert(f.key);
  if (bkeys != akeys) return reject(provenance, Outcome::function_added_or_removed, "");

  std::map<std::string, const Keyed*> after_by_key;
  for (const auto& f : af) after_by_key[f.key] = &f;
  std::vector<std::pair<const Keyed*, const Keyed*>> changed;
  for (const auto& f : bf) {
    const auto* g = after_by_key[f.key];
    if (f.text != g->text) changed.emplace_back(&f, g);
  }
  if (changed.empty()) return reject(provenance, Outcome::no_function_change, "");
  if (changed.size() > 1)
    return reject(provenance, Outcome::multiple_functions,
                  std::to_string(changed.size()) + " functions changed");
  if (skeleton(before_lines, bf) != skeleton(after_lines, af))
    return reject(provenance, Outcome::change_outside_function, "");

  auto [b, a] = changed.front();
  auto make = [](const syntax::SourceFile& file, const Keyed& k) {
    return SourceFunction{file.path, k.span.name, k.span.start_line, k.span.end_line, k.text};
  };
  FunctionPair pair{std::move(id), make(before, *b), make(after, *a), {}, provenance};
  pair.region = derive_region(pair);
  return {std::move(provenance), Outcome::pair, "", std::move(pair)};
}

std::vector<DiffResult> scan_corpus(const std::string& root_str, const IngestOptions& options) {
  auto layout = detect_layout(root_str);
  fs::path root(root_str);
  std::vector<fs::path> entries;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto& p = e.path();
    if (layout == Layout::megadiff) {
      if (p.extension() == ".diff" || p.extension() == ".patch") entries.push_back(p);
    } else if (ends_with(p.stem().string(), "_before")) {
      entries.push_back(p);
    }
  }
  std::sort(entries.begin(), entries.end());

  std::vector<DiffResult> results(entries.size());
  parallel_for(entries.size(), options.workers, [&](std::size_t i) {
    try {
      results[i] = layout == Layout::megadiff
                       ? scan_megadiff_entry(root, entries[i], options.language)
                       : scan_file_pair(root, entries[i], options.language);
    } catch (const std::exception& e) {
      results[i] = reject(rel(entries[i], root), Outcome::parse_failure, e.what());
    }
  });
  if (options.log)
    for (const auto& r : results)
      if (r.outcome != Outcome::pair)
        options.log("skip " + r.provenance + ": " + std::string(to_string(r.outcome)) +
                    (r.detail.empty() ? "" : " (" + r.detail + ")"));
  return results;
}

std::vector<FunctionPair> ingest_diff_corpus(const std::string& root,
                                             const IngestOptions& options) {
  std::vector<FunctionPair> out;
  for (auto& r : scan_corpus(root, options))
    if (r.pair) out.push_back(std::move(*r.pair));
  return out;
}

Region derive_region(const FunctionPair& pair) {
  return repr::derive_region(pair.buggy.text, pair.fixed.text);
}

std::vector<FunctionPair> dedupe(const std::vector<FunctionPair>& pairs) {
  std::unordered_set<std::string> seen;
  std::vector<FunctionPair> out;
  for (const auto& p : pairs) {
    auto key = trimmed_lines(p.buggy.text) + '\0' + trimmed_lines(p.fixed.text);
    if (seen.insert(std::move(key)).second) out.push_back(p);
  }
  return out;
}

std::vector<LeakageEntry> load_denylist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open denylist: " + path);
  std::vector<LeakageEntry> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      auto j = json::parse(line);
      out.push_back({j.at("bug_id").get<std::string>(), j.at("function").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

const std::vector<std::string>& default_leakage_ids() {
  static const std::vector<std::string> ids = {"Math-28", "Math-44", "JacksonDatabind-82"};
  return ids;
}

std::vector<FunctionPair> exclude_leakage(const std::vector<FunctionPair>& pairs,
                                          const std::vector<LeakageEntry>& denylist,
                                          const LogSink& log) {
  std::vector<std::pair<std::string, std::string>> needles;
  for (const auto& d : denylist) {
    auto c = text::collapse_whitespace(d.function);
    if (!c.empty()) needles.emplace_back(d.bug_id, std::move(c));
  }
  std::vector<FunctionPair> out;
  for (const auto& p : pairs) {
    auto hay = text::collapse_whitespace(p.fixed.text);
    auto hit = std::find_if(needles.begin(), needles.end(), [&](const auto& n) {
      return hay.find(n.second) != std::string::npos;
    });
    if (hit == needles.end()) {
      out.push_back(p);
    } else if (log) {
      log("exclude " + p.id + ": matches " + hit->first);
    }
  }
  return out;
}

void check_tokenizer(std::string_view tokenizer) {
  if (tokenizer == "approximate") return;
  if (tokenizer.starts_with(kExternalPrefix) && tokenizer.size() > kExternalPrefix.size()) return;
  throw UnknownTokenizer("unknown tokenizer '" + std::string(tokenizer) +
                         "' (use 'approximate' or 'external:<command>')");
}

std::size_t count_tokens(std::string_view s, std::string_view tokenizer) {
  check_tokenizer(tokenizer);
  if (tokenizer == "approximate") return approximate_tokens(s);
  return external_tokens(s, tokenizer.substr(kExternalPrefix.size()));
}

std::vector<TrainingSample> build_dataset(const std::vector<FunctionPair>& pairs, ReprPair kind,
                                          const CorpusFilterConfig& filter,
                                          const repr::Markers& markers, DatasetStats* stats,
                                          const BuildOptions& options) {
  if (!repr::valid_pair(kind))
    throw repr::InvalidPair(kind.to_string() + " is not a supported representation pair");
  check_tokenizer(filter.tokenizer);

  enum class Fate { emitted, over_length, mismatch, unrepresentable };
  std::vector<std::optional<TrainingSample>> samples(pairs.size());
  std::vector<Fate> fates(pairs.size(), Fate::emitted);
  std::vector<std::string> notes(pairs.size());

  parallel_for(pairs.size(), options.workers, [&](std::size_t i) {
    const auto& p = pairs[i];
    TrainingSample s{p.id, kind, {}, {}, 0};
    try {
      s.input = repr::build_input(p.buggy, p.region, kind.input, markers);
      s.output = repr::build_output(p.buggy, p.fixed, p.region, kind.output);
    } catch (const repr::RegionMismatch& e) {
      fates[i] = Fate::mismatch;
      notes[i] = e.what();
      return;
    }
    s.token_count = count_tokens(s.input, filter.tokenizer) + count_tokens(s.output, filter.tokenizer);
    if (s.token_count >= filter.max_length) {
      fates[i] = Fate::over_length;
      notes[i] = std::to_string(s.token_count) + " tokens";
      return;
    }
    std::string back;
    try {
      back = repr::reconstruct(p.buggy, p.region, kind, s.output, markers);
    } catch (const Error& e) {
      back.clear();
      notes[i] = e.what();
    }
    if (back != p.fixed.text) {
      fates[i] = Fate::unrepresentable;
      if (notes[i].empty()) notes[i] = "output does not reconstruct the fixed function";
      return;
    }
    samples[i] = std::move(s);
  });

  DatasetStats local;
  local.considered = pairs.size();
  std::vector<TrainingSample> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    switch (fates[i]) {
      case Fate::emitted: out.push_back(std::move(*samples[i])); break;
      case Fate::over_length: ++local.dropped_over_length; break;
      case Fate::mismatch: ++local.region_mismatch; break;
      case Fate::unrepresentable: ++local.unrepresentable; break;
    }
    if (fates[i] != Fate::emitted && options.log)
      options.log("drop " + pairs[i].id + ": " + notes[i]);
  }
  local.emitted = out.size();
  if (stats) *stats = local;
  return out;
}

std::size_t emit_dataset(const std::vector<TrainingSample>& samples, const std::string& out) {
  std::string body;
  for (const auto& s : samples) {
    ordered_json j;
    j["id"] = s.id;
    j["pair"] = s.pair.to_string();
    j["input"] = s.input;
    j["output"] = s.output;
    j["token_count"] = s.token_count;
    body += j.dump(-1, ' ', false, json::error_handler_t::replace);
    body += '\n';
  }
  text::write_file(out, body);
  return samples.size();
}

std::vector<TrainingSample> read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset: " + path);
  std::vector<TrainingSample> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      auto j = json::parse(line);
      auto pair = ReprPair::parse(j.at("pair").get<std::string>());
      if (!pair) throw Error("bad pair tag");
      out.push_back({j.at("id"), *pair, j.at("input"), j.at("output"),
                     j.at("token_count").get<std::size_t>()});
    } catch (const std::exception& e) {
      throw Error(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::optional<ReprPair> dataset_pair(const std::string& path) {
  std::optional<ReprPair> tag;
  for (const auto& s : read_dataset(path)) {
    if (tag && !(*tag == s.pair))
      throw MixedDataset("dataset mixes " + tag->to_string() + " and " + s.pair.to_string() +
                         " samples");
    tag = s.pair;
  }
  return tag;
}

std::string render_training_config(const TrainingConfig& c, std::optional<ReprPair> pair) {
  std::ostringstream os;
  os << "base_model=" << c.base_model << '\n'
     << "learning_rate=" << c.learning_rate << '\n'
     << "schedule=" << c.schedule << '\n'
     << "epochs=" << c.epochs << '\n'
     << "batch_size_per_device=" << c.batch_size_per_device << '\n'
     << "optimizer=" << c.optimizer << '\n'
     << "lora_rank=" << c.lora_rank << '\n'
     << "lora_alpha=" << c.lora_alpha << '\n'
     << "lora_dropout=" << c.lora_dropout << '\n'
     << "target_layers=";
  for (std::size_t i = 0; i < c.target_layers.size(); ++i)
    os << (i ? "," : "") << c.target_layers[i];
  os << '\n' << "max_length=" << c.max_length << '\n';
  if (pair) os << "representation=" << pair->to_string() << '\n';
  return os.str();
}

}  // namespace aprkit::corpus
