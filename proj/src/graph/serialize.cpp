#include <cctype>
#include <charconv>
#include <sstream>

#include "ctaylor/graph.hpp"

namespace ctaylor::ir {

namespace {

constexpr std::string_view kHeader = "# ctaylor-ir v1";

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string attrs(const Node& n) {
  switch (n.op) {
    case Op::Leaf: return n.batched ? n.name + ", " + std::to_string(n.count) : n.name;
    case Op::Param:
    case Op::Output: return n.name;
    case Op::Replicate: return std::to_string(n.count);
    case Op::TanhDeriv: return std::to_string(n.order);
    case Op::Scale: return format_double(n.factor);
    case Op::Contract: {
      std::string s = "\"" + n.spec.to_string() + "\"";
      if (n.factor != 1.0) s += ", " + format_double(n.factor);
      return s;
    }
    default: return "";
  }
}

}  // namespace

std::string serialize(const Graph& graph) {
  std::ostringstream os;
  os << kHeader << '\n';
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const Node& n = graph.nodes()[i];
    os << '%' << i << " = " << op_name(n.op);
    std::string a = attrs(n);
    if (!a.empty()) os << '[' << a << ']';
    if (!n.inputs.empty()) {
      os << '(';
      for (std::size_t k = 0; k < n.inputs.size(); ++k) os << (k ? ", %" : "%") << n.inputs[k];
      os << ')';
    }
    os << " : " << (n.batched ? "batched" : "unbatched");
    if (n.slot) {
      os << "  # n" << n.slot->node << ":k" << n.slot->degree;
      if (n.slot->group != 0) os << ":g" << n.slot->group;
    }
    os << '\n';
  }
  return os.str();
}

namespace {

class LineParser {
 public:
  LineParser(std::string_view text, int line) : s_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, msg + " near '" + std::string(s_) + "'"); }

  void skip_spaces() {
    while (!s_.empty() && s_.front() == ' ') s_.remove_prefix(1);
  }
  bool accept(std::string_view token) {
    skip_spaces();
    if (s_.substr(0, token.size()) != token) return false;
    s_.remove_prefix(token.size());
    return true;
  }
  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }
  long long integer() {
    skip_spaces();
    long long v = 0;
    auto res = std::from_chars(s_.data(), s_.data() + s_.size(), v);
    if (res.ec != std::errc()) fail("expected an integer");
    s_.remove_prefix(static_cast<std::size_t>(res.ptr - s_.data()));
    return v;
  }
  std::string_view word() {
    skip_spaces();
    std::size_t n = 0;
    while (n < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[n])) || s_[n] == '_')) ++n;
    if (n == 0) fail("expected a word");
    std::string_view w = s_.substr(0, n);
    s_.remove_prefix(n);
    return w;
  }
  // Everything up to the closing delimiter, which is consumed.
  std::string_view until(char close) {
    auto pos = s_.find(close);
    if (pos == std::string_view::npos) fail(std::string("missing '") + close + "'");
    std::string_view body = s_.substr(0, pos);
    s_.remove_prefix(pos + 1);
    return body;
  }
  bool done() {
    skip_spaces();
    return s_.empty();
  }

 private:
  std::string_view s_;
  int line_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

Op op_from_name(std::string_view name, const LineParser& p) {
  for (int i = 0; i <= static_cast<int>(Op::Output); ++i)
    if (op_name(static_cast<Op>(i)) == name) return static_cast<Op>(i);
  p.fail("unknown op '" + std::string(name) + "'");
}

double parse_double(std::string_view text, const LineParser& p) {
  text = trim(text);
  double v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) p.fail("bad number '" + std::string(text) + "'");
  return v;
}

std::size_t parse_count(std::string_view text, const LineParser& p) {
  text = trim(text);
  std::size_t v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) p.fail("bad count '" + std::string(text) + "'");
  return v;
}

void apply_attrs(Node& n, std::string_view a, const LineParser& p) {
  auto comma = a.find(',');
  switch (n.op) {
    case Op::Leaf:
      n.name = std::string(trim(a.substr(0, comma)));
      if (comma != std::string_view::npos) {
        n.batched = true;
        n.count = parse_count(a.substr(comma + 1), p);
      }
      break;
    case Op::Param:
    case Op::Output: n.name = std::string(trim(a)); break;
    case Op::Replicate: n.count = parse_count(a, p); break;
    case Op::TanhDeriv: n.order = static_cast<int>(parse_count(a, p)); break;
    case Op::Scale: n.factor = parse_double(a, p); break;
    case Op::Contract: {
      a = trim(a);
      if (a.empty() || a.front() != '"') p.fail("contraction spec must be quoted");
      auto close = a.find('"', 1);
      if (close == std::string_view::npos) p.fail("unterminated contraction spec");
      try {
        n.spec = ContractSpec::parse(a.substr(1, close - 1));
      } catch (const std::invalid_argument& e) {
        p.fail(e.what());
      }
      std::string_view rest = trim(a.substr(close + 1));
      if (!rest.empty()) {
        if (rest.front() != ',') p.fail("expected ',' after contraction spec");
        n.factor = parse_double(rest.substr(1), p);
      }
      break;
    }
    default:
      if (!trim(a).empty()) p.fail("op takes no attributes");
  }
}

}  // namespace

Graph parse(std::string_view text) {
  Graph graph;
  int line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    LineParser p(line, line_no);
    p.expect("%");
    long long id = p.integer();
    if (id != static_cast<long long>(graph.size()))
      p.fail("node id %" + std::to_string(id) + " out of sequence, expected %" + std::to_string(graph.size()));
    p.expect("=");
    Node n;
    n.op = op_from_name(p.word(), p);
    if (p.accept("[")) apply_attrs(n, p.until(']'), p);
    if (p.accept("(")) {
      std::string_view args = p.until(')');
      LineParser ap(args, line_no);
      while (!ap.done()) {
        ap.expect("%");
        n.inputs.push_back(static_cast<NodeId>(ap.integer()));
        if (!ap.done()) ap.expect(",");
      }
    }
    p.expect(":");
    std::string_view batching = p.word();
    if (batching != "batched" && batching != "unbatched") p.fail("batching must be 'batched' or 'unbatched'");
    const bool declared = batching == "batched";
    if (p.accept("#")) {
      JetSlot slot;
      p.expect("n");
      slot.node = static_cast<int>(p.integer());
      p.expect(":k");
      slot.degree = static_cast<int>(p.integer());
      if (p.accept(":g")) slot.group = static_cast<int>(p.integer());
      n.slot = slot;
    }
    if (!p.done()) p.fail("trailing characters");
    if (n.op == Op::Leaf && declared != n.batched) p.fail("leaf batching does not match its attributes");
    try {
      graph.append(n);
    } catch (const std::invalid_argument& e) {
      p.fail(e.what());
    }
    if (graph.nodes().back().batched != declared) p.fail("declared batching disagrees with inferred batching");
  }
  return graph;
}

}  // namespace ctaylor::ir
