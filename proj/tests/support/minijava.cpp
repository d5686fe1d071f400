// Tiny interpreter for a subset of Java, used as the build and test runner of
// fixture projects (no JDK is needed).
//
//   minijava check Main.java             exit 0, or 2 on a build error
//   minijava test Main.java tests.txt    exit 0 all pass, 1 failure, 2 build error
//
// Supported: static methods over int, long, boolean and int[]; locals, if,
// while, for, break, continue, return, the usual operators, ?:, ++/--,
// compound assignment, array creation/initializers/.length and
// Math.abs/min/max. A test line is a boolean Java expression, e.g.
// `clamp(5, 0, 3) == 3`; blank lines and lines starting with # are skipped.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "aprkit/syntax.hpp"
#include "aprkit/text.hpp"

using aprkit::syntax::Node;

namespace {

struct BuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Array = std::shared_ptr<std::vector<std::int64_t>>;
using Value = std::variant<std::int64_t, bool, Array>;

std::int64_t as_int(const Value& v) {
  if (auto p = std::get_if<std::int64_t>(&v)) return *p;
  throw RuntimeError("expected a number");
}
bool as_bool(const Value& v) {
  if (auto p = std::get_if<bool>(&v)) return *p;
  throw RuntimeError("expected a boolean");
}
Array as_array(const Value& v) {
  if (auto p = std::get_if<Array>(&v); p && *p) return *p;
  throw RuntimeError("expected an array");
}

std::string show(const Value& v) {
  if (auto p = std::get_if<std::int64_t>(&v)) return std::to_string(*p);
  if (auto p = std::get_if<bool>(&v)) return *p ? "true" : "false";
  std::string s = "{";
  for (auto x : *as_array(v)) s += (s.size() > 1 ? ", " : "") + std::to_string(x);
  return s + "}";
}

const Node* field(const Node& n, std::string_view name) {
  for (const auto& c : n.children)
    if (c.field == name) return &c;
  return nullptr;
}

std::vector<const Node*> named(const Node& n) {
  std::vector<const Node*> out;
  for (const auto& c : n.children)
    if (c.named && c.kind != "line_comment" && c.kind != "block_comment") out.push_back(&c);
  return out;
}

std::string op_of(const Node& n) {
  if (auto o = field(n, "operator")) return *o->label;
  for (const auto& c : n.children)
    if (!c.named) return *c.label;
  return {};
}

enum class Flow { normal, brk, cont, ret };

struct Method {
  const Node* decl;
  std::vector<std::string> params;
};

class Interpreter {
 public:
  void load(const Node& root) {
    visit_methods(root);
    for (const auto& [name, m] : methods_) check(*m.decl);
  }

  Value call(const std::string& name, const std::vector<Value>& args) {
    auto it = methods_.find(name);
    if (it == methods_.end()) throw RuntimeError("unknown method " + name);
    if (it->second.params.size() != args.size()) throw RuntimeError("arity mismatch for " + name);
    if (++depth_ > 2000) throw RuntimeError("stack overflow");
    std::vector<std::map<std::string, Value>> saved;
    saved.swap(scopes_);
    scopes_.emplace_back();
    for (std::size_t i = 0; i < args.size(); ++i) scopes_.back()[it->second.params[i]] = args[i];
    Value result = std::int64_t{0};
    exec(*field(*it->second.decl, "body"), result);
    scopes_.swap(saved);
    --depth_;
    return result;
  }

  Value eval_free(const Node& expr) {
    scopes_.assign(1, {});
    return eval(expr);
  }

  bool has_method(const std::string& name) const { return methods_.count(name) > 0; }

 private:
  void visit_methods(const Node& n) {
    if (n.kind == "method_declaration") {
      Method m{&n, {}};
      for (const auto* p : named(*field(n, "parameters")))
        m.params.push_back(*field(*p, "name")->label);
      methods_[*field(n, "name")->label] = m;
      return;
    }
    for (const auto& c : n.children) visit_methods(c);
  }

  void check(const Node& n) {
    static const std::set<std::string> kinds = {
        "method_declaration", "modifiers", "formal_parameters", "formal_parameter",
        "integral_type", "boolean_type", "array_type", "dimensions", "dimensions_expr",
        "block", "local_variable_declaration", "variable_declarator", "expression_statement",
        "if_statement", "while_statement", "for_statement", "return_statement",
        "break_statement", "continue_statement", "parenthesized_expression",
        "binary_expression", "unary_expression", "update_expression", "assignment_expression",
        "ternary_expression", "method_invocation", "argument_list", "array_access",
        "array_creation_expression", "array_initializer", "field_access", "identifier",
        "decimal_integer_literal", "true", "false", "line_comment", "block_comment"};
    if (!n.named) return;
    if (!kinds.count(n.kind)) throw BuildError("unsupported construct: " + n.kind);
    if (n.kind == "method_invocation") {
      auto name = *field(n, "name")->label;
      if (auto obj = field(n, "object")) {
        if (obj->label != "Math" || (name != "abs" && name != "min" && name != "max"))
          throw BuildError("cannot resolve method " + name);
      } else if (!methods_.count(name)) {
        throw BuildError("cannot resolve method " + name);
      }
    }
    for (const auto& c : n.children) check(c);
  }

  Value* lookup(const std::string& name) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(name); f != it->end()) return &f->second;
    throw RuntimeError("undefined variable " + name);
  }

  void declare(const Node& decl) {
    for (const auto* d : named(decl)) {
      if (d->kind != "variable_declarator") continue;
      auto v = field(*d, "value");
      scopes_.back()[*field(*d, "name")->label] = v ? eval(*v) : Value{std::int64_t{0}};
    }
  }

  Flow exec(const Node& n, Value& result) {
    if (n.kind == "block") {
      scopes_.emplace_back();
      Flow f = Flow::normal;
      for (const auto* s : named(n)) {
        f = exec(*s, result);
        if (f != Flow::normal) break;
      }
      scopes_.pop_back();
      return f;
    }
    if (n.kind == "local_variable_declaration") {
      declare(n);
      return Flow::normal;
    }
    if (n.kind == "expression_statement") {
      eval(*named(n)[0]);
      return Flow::normal;
    }
    if (n.kind == "return_statement") {
      auto parts = named(n);
      if (!parts.empty()) result = eval(*parts[0]);
      return Flow::ret;
    }
    if (n.kind == "break_statement") return Flow::brk;
    if (n.kind == "continue_statement") return Flow::cont;
    if (n.kind == "if_statement") {
      if (as_bool(eval(*field(n, "condition")))) return exec(*field(n, "consequence"), result);
      if (auto alt = field(n, "alternative")) return exec(*alt, result);
      return Flow::normal;
    }
    if (n.kind == "while_statement") {
      while (as_bool(eval(*field(n, "condition")))) {
        Flow f = exec(*field(n, "body"), result);
        if (f == Flow::brk) break;
        if (f == Flow::ret) return f;
      }
      return Flow::normal;
    }
    if (n.kind == "for_statement") {
      scopes_.emplace_back();
      for (const auto& c : n.children) {
        if (c.field != "init") continue;
        if (c.kind == "local_variable_declaration")
          declare(c);
        else
          eval(c);
      }
      Flow out = Flow::normal;
      while (true) {
        if (auto cond = field(n, "condition"); cond && !as_bool(eval(*cond))) break;
        Flow f = exec(*field(n, "body"), result);
        if (f == Flow::brk) break;
        if (f == Flow::ret) {
          out = f;
          break;
        }
        for (const auto& c : n.children)
          if (c.field == "update") eval(c);
      }
      scopes_.pop_back();
      return out;
    }
    throw RuntimeError("cannot execute " + n.kind);
  }

  Value& lvalue(const Node& n, std::int64_t*& slot) {
    slot = nullptr;
    if (n.kind == "identifier") return *lookup(*n.label);
    if (n.kind == "array_access") {
      auto arr = as_array(eval(*field(n, "array")));
      auto i = as_int(eval(*field(n, "index")));
      if (i < 0 || i >= static_cast<std::int64_t>(arr->size()))
        throw RuntimeError("index " + std::to_string(i) + " out of bounds");
      slot = &(*arr)[i];
      scratch_ = *slot;
      return scratch_;
    }
    if (n.kind == "parenthesized_expression") return lvalue(*named(n)[0], slot);
    throw RuntimeError("not assignable: " + n.kind);
  }

  void store(Value& ref, std::int64_t* slot, const Value& v) {
    if (slot)
      *slot = as_int(v);
    else
      ref = v;
  }

  static std::int64_t arith(const std::string& op, std::int64_t a, std::int64_t b) {
    if (op == "+") return a + b;
    if (op == "-") return a - b;
    if (op == "*") return a * b;
    if ((op == "/" || op == "%") && b == 0) throw RuntimeError("division by zero");
    if (op == "/") return a / b;
    if (op == "%") return a % b;
    throw RuntimeError("unknown operator " + op);
  }

  Value eval(const Node& n) {
    const auto& k = n.kind;
    if (k == "decimal_integer_literal") {
      auto s = *n.label;
      if (!s.empty() && (s.back() == 'L' || s.back() == 'l')) s.pop_back();
      return static_cast<std::int64_t>(std::stoll(s));
    }
    if (k == "true") return true;
    if (k == "false") return false;
    if (k == "identifier") return *lookup(*n.label);
    if (k == "parenthesized_expression") return eval(*named(n)[0]);
    if (k == "field_access") {
      if (field(n, "field")->label != "length") throw RuntimeError("unknown field");
      return static_cast<std::int64_t>(as_array(eval(*field(n, "object")))->size());
    }
    if (k == "array_access") {
      std::int64_t* slot;
      lvalue(n, slot);
      return *slot;
    }
    if (k == "array_creation_expression") {
      if (auto init = field(n, "value")) return eval(*init);
      auto dims = field(n, "dimensions");
      auto size = as_int(eval(*named(*dims)[0]));
      if (size < 0) throw RuntimeError("negative array size");
      return std::make_shared<std::vector<std::int64_t>>(size, 0);
    }
    if (k == "array_initializer") {
      auto arr = std::make_shared<std::vector<std::int64_t>>();
      for (const auto* e : named(n)) arr->push_back(as_int(eval(*e)));
      return arr;
    }
    if (k == "unary_expression") {
      auto op = op_of(n);
      auto v = eval(*field(n, "operand"));
      if (op == "!") return !as_bool(v);
      if (op == "-") return -as_int(v);
      if (op == "+") return as_int(v);
      throw RuntimeError("unknown unary " + op);
    }
    if (k == "binary_expression") {
      auto op = op_of(n);
      if (op == "&&") return as_bool(eval(*field(n, "left"))) && as_bool(eval(*field(n, "right")));
      if (op == "||") return as_bool(eval(*field(n, "left"))) || as_bool(eval(*field(n, "right")));
      auto a = eval(*field(n, "left"));
      auto b = eval(*field(n, "right"));
      if (op == "==" || op == "!=") {
        bool eq = std::holds_alternative<bool>(a) ? as_bool(a) == as_bool(b) : as_int(a) == as_int(b);
        return op == "==" ? eq : !eq;
      }
      auto x = as_int(a), y = as_int(b);
      if (op == "<") return x < y;
      if (op == "<=") return x <= y;
      if (op == ">") return x > y;
      if (op == ">=") return x >= y;
      return arith(op, x, y);
    }
    if (k == "ternary_expression")
      return as_bool(eval(*field(n, "condition"))) ? eval(*field(n, "consequence"))
                                                   : eval(*field(n, "alternative"));
    if (k == "update_expression") {
      const Node* target = named(n)[0];
      bool prefix = !n.children.front().named;
      bool inc = op_of(n) == "++";
      std::int64_t* slot;
      Value& ref = lvalue(*target, slot);
      auto old = as_int(slot ? Value{*slot} : ref);
      auto now = old + (inc ? 1 : -1);
      store(ref, slot, now);
      return prefix ? now : old;
    }
    if (k == "assignment_expression") {
      auto op = op_of(n);
      auto rhs = eval(*field(n, "right"));
      std::int64_t* slot;
      Value& ref = lvalue(*field(n, "left"), slot);
      if (op != "=") {
        auto cur = as_int(slot ? Value{*slot} : ref);
        rhs = arith(op.substr(0, op.size() - 1), cur, as_int(rhs));
      }
      store(ref, slot, rhs);
      return rhs;
    }
    if (k == "method_invocation") {
      std::vector<Value> args;
      for (const auto* a : named(*field(n, "arguments"))) args.push_back(eval(*a));
      auto name = *field(n, "name")->label;
      if (field(n, "object")) {
        if (name == "abs") return std::llabs(as_int(args.at(0)));
        if (name == "min") return std::min(as_int(args.at(0)), as_int(args.at(1)));
        if (name == "max") return std::max(as_int(args.at(0)), as_int(args.at(1)));
      }
      return call(name, args);
    }
    throw RuntimeError("cannot evaluate " + k);
  }

  std::map<std::string, Method> methods_;
  std::vector<std::map<std::string, Value>> scopes_;
  Value scratch_;
  int depth_ = 0;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3 || (std::string(argv[1]) != "check" && std::string(argv[1]) != "test") ||
      (std::string(argv[1]) == "test" && argc < 4)) {
    std::cerr << "usage: minijava check FILE | minijava test FILE TESTS\n";
    return 2;
  }
  Interpreter interp;
  aprkit::syntax::SyntaxTree tree;
  try {
    tree = aprkit::syntax::parse(aprkit::text::read_file(argv[2]));
    interp.load(tree.root);
  } catch (const std::exception& e) {
    std::cerr << "build error: " << e.what() << "\n";
    return 2;
  }
  if (std::string(argv[1]) == "check") return 0;

  std::ifstream in(argv[3]);
  if (!in) {
    std::cerr << "cannot read " << argv[3] << "\n";
    return 2;
  }
  int failures = 0, total = 0;
  std::string line;
  std::vector<aprkit::syntax::SyntaxTree> keep;
  while (std::getline(in, line)) {
    auto t = aprkit::text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    ++total;
    try {
      keep.push_back(aprkit::syntax::parse("class T { boolean t() { return " + std::string(t) +
                                           "; } }"));
      const Node* n = &keep.back().root;
      while (n->kind != "return_statement") {
        const Node* next = nullptr;
        for (const auto& c : n->children)
          if (c.kind == "return_statement" || c.kind == "class_declaration" ||
              c.kind == "class_body" || c.kind == "method_declaration" || c.kind == "block")
            next = &c;
        n = next;
      }
      auto v = interp.eval_free(*named(*n)[0]);
      if (!std::holds_alternative<bool>(v) || !std::get<bool>(v)) {
        ++failures;
        std::cout << "FAIL " << t << " (got " << show(v) << ")\n";
      }
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL " << t << " (" << e.what() << ")\n";
    }
  }
  std::cout << (total - failures) << "/" << total << " tests passed\n";
  return failures == 0 ? 0 : 1;
}
