#include "relichoice/dsl.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "format_util.hpp"

namespace relichoice::dsl {

using model::ComponentParams;
using model::ExprKind;
using model::SystemExpr;
using model::SystemSpec;

namespace {

enum class Tok {
  ident, num, lparen, rparen, lbracket, rbracket, langle, rangle,
  comma, semi, colon, pipe, equals, underscore, end
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double value = 0.0;
  int line = 1;
  int column = 1;

  SourceSpan span() const {
    return {line, column, text.empty() ? 1 : static_cast<int>(text.size())};
  }
};

[[noreturn]] void fail(ParseErrorKind kind, const Token& tok, const std::string& msg) {
  throw ParseError(kind, tok.span(), msg);
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += count;
  };

  while (i < n) {
    const char c = text[i];
    if (c == '#') {
      while (i < n && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      tok.kind = Tok::ident;
      tok.text = text.substr(i, j - i);
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      double value = 0.0;
      const char* begin = text.data() + i;
      const char* end = text.data() + n;
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr == begin) {
        tok.text = std::string(1, c);
        fail(ParseErrorKind::lex, tok, std::string("unknown token '") + c + "'");
      }
      tok.kind = Tok::num;
      tok.text = text.substr(i, static_cast<std::size_t>(ptr - begin));
      tok.value = value;
      advance(tok.text.size());
      out.push_back(std::move(tok));
      continue;
    }
    tok.text = std::string(1, c);
    switch (c) {
      case '(': tok.kind = Tok::lparen; break;
      case ')': tok.kind = Tok::rparen; break;
      case '[': tok.kind = Tok::lbracket; break;
      case ']': tok.kind = Tok::rbracket; break;
      case '<': tok.kind = Tok::langle; break;
      case '>': tok.kind = Tok::rangle; break;
      case ',': tok.kind = Tok::comma; break;
      case ';': tok.kind = Tok::semi; break;
      case ':': tok.kind = Tok::colon; break;
      case '|': tok.kind = Tok::pipe; break;
      case '=': tok.kind = Tok::equals; break;
      case '_': tok.kind = Tok::underscore; break;
      default:
        fail(ParseErrorKind::lex, tok, std::string("unknown token '") + c + "'");
    }
    advance(1);
    out.push_back(std::move(tok));
  }

  Token eof;
  eof.kind = Tok::end;
  eof.text = "";
  eof.line = line;
  eof.column = col;
  out.push_back(std::move(eof));
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : tokens_(lex(text)) {}

  SystemSpec run() {
    SystemSpec spec;
    while (at_ident("comp")) parse_compdecl(spec);
    if (spec.components.empty()) {
      fail(ParseErrorKind::syntax, peek(), "expected a 'comp' declaration");
    }
    if (!at_ident("system")) {
      fail(ParseErrorKind::syntax, peek(), "expected 'comp' or 'system'");
    }
    get();
    expect(Tok::colon, "':' after 'system'");
    SystemExpr root = parse_expr(spec);
    if (peek().kind != Tok::end) {
      fail(ParseErrorKind::syntax, peek(), "unexpected trailing input");
    }
    spec.root = model::canonicalize(root);
    return spec;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& get() { return tokens_[pos_++]; }

  bool at_ident(const char* word) const {
    return peek().kind == Tok::ident && peek().text == word;
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) {
      fail(ParseErrorKind::syntax, peek(), "expected " + what);
    }
    return get();
  }

  const Token& expect_keyword(const char* word) {
    if (!at_ident(word)) {
      fail(ParseErrorKind::syntax, peek(), std::string("expected '") + word + "'");
    }
    return get();
  }

  double parse_kv(const char* key) {
    expect_keyword(key);
    expect(Tok::equals, std::string("'=' after '") + key + "'");
    const Token& num = expect(Tok::num, std::string("number for '") + key + "'");
    last_num_ = num;
    return num.value;
  }

  void parse_compdecl(SystemSpec& spec) {
    get();  // comp
    const Token name = expect(Tok::ident, "component name");
    if (spec.components.count(name.text)) {
      fail(ParseErrorKind::semantic, name, "duplicate component id " + name.text);
    }
    expect(Tok::lparen, "'('");
    ComponentParams cp;
    cp.id = name.text;
    cp.lambda = parse_kv("lambda");
    if (!std::isfinite(cp.lambda) || cp.lambda <= 0.0) {
      fail(ParseErrorKind::semantic, last_num_,
           "lambda " + detail::human(cp.lambda) + " must be > 0");
    }
    expect(Tok::comma, "','");
    cp.t0 = parse_kv("t0");
    if (!std::isfinite(cp.t0) || cp.t0 < 0.0) {
      fail(ParseErrorKind::semantic, last_num_,
           "t0 " + detail::human(cp.t0) + " must be >= 0");
    }
    if (peek().kind == Tok::comma) {
      get();
      cp.p = parse_kv("p");
      if (!std::isfinite(*cp.p) || *cp.p < 0.0 || *cp.p > 1.0) {
        fail(ParseErrorKind::semantic, last_num_,
             "p " + detail::human(*cp.p) + " outside [0, 1]");
      }
    }
    expect(Tok::rparen, "')'");
    spec.components.emplace(cp.id, std::move(cp));
  }

  SystemExpr parse_expr(const SystemSpec& spec) {
    std::vector<SystemExpr> terms;
    terms.push_back(parse_term(spec));
    while (peek().kind == Tok::semi) {
      get();
      terms.push_back(parse_term(spec));
    }
    if (terms.size() == 1) return std::move(terms.front());
    return SystemExpr::series(std::move(terms));
  }

  SystemExpr parse_term(const SystemSpec& spec) {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::ident: {
        if (!spec.components.count(tok.text)) {
          fail(ParseErrorKind::semantic, tok, "undeclared component " + tok.text);
        }
        return SystemExpr::leaf(get().text);
      }
      case Tok::lparen: {
        get();
        SystemExpr e = parse_expr(spec);
        expect(Tok::rparen, "')'");
        return e;
      }
      case Tok::lbracket:
        return parse_prob_choice(spec);
      case Tok::langle:
        return parse_uniform_choice(spec);
      default:
        fail(ParseErrorKind::syntax, tok, "expected a component, a choice, or '('");
    }
  }

  SystemExpr parse_prob_choice(const SystemSpec& spec) {
    const Token open = get();  // '['
    std::vector<SystemExpr> children;
    std::vector<double> weights;
    std::optional<std::size_t> residual_index;
    std::vector<Token> weight_tokens;

    while (true) {
      const Token& tok = peek();
      if (tok.kind == Tok::underscore) {
        get();
        if (residual_index) {
          fail(ParseErrorKind::semantic, tok, "more than one residual branch");
        }
        residual_index = children.size();
        weights.push_back(0.0);
        weight_tokens.push_back(tok);
      } else {
        const Token& num = expect(Tok::num, "branch weight or '_'");
        weights.push_back(num.value);
        weight_tokens.push_back(num);
      }
      expect(Tok::colon, "':' after branch weight");
      children.push_back(parse_expr(spec));
      if (peek().kind != Tok::comma) break;
      get();
    }
    expect(Tok::rbracket, "']'");

    if (children.size() < 2) {
      fail(ParseErrorKind::semantic, open, "choice needs at least 2 branches");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (residual_index && k == *residual_index) continue;
      const double w = weights[k];
      if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
        fail(ParseErrorKind::semantic, weight_tokens[k],
             "weight " + detail::human(w) + " outside [0, 1]");
      }
      sum += w;
    }
    if (residual_index) {
      const double r = 1.0 - sum;
      if (r < -model::kWeightSumTolerance) {
        fail(ParseErrorKind::semantic, weight_tokens[*residual_index],
             "residual weight " + detail::human(r) + " is negative");
      }
      weights[*residual_index] = std::min(1.0, std::max(0.0, r));
    } else if (std::fabs(sum - 1.0) > model::kWeightSumTolerance) {
      fail(ParseErrorKind::semantic, open,
           "weights sum " + detail::human(sum) + " ≠ 1");
    }
    return SystemExpr::prob_choice(std::move(weights), std::move(children));
  }

  SystemExpr parse_uniform_choice(const SystemSpec& spec) {
    const Token open = get();  // '<'
    std::vector<SystemExpr> children;
    children.push_back(parse_expr(spec));
    while (peek().kind == Tok::pipe) {
      get();
      children.push_back(parse_expr(spec));
    }
    expect(Tok::rangle, "'>'");
    if (children.size() < 2) {
      fail(ParseErrorKind::semantic, open, "choice needs at least 2 branches");
    }
    return SystemExpr::uniform_choice(std::move(children));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Token last_num_;
};

void format_expr(const SystemExpr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::leaf:
      out += e.component;
      return;
    case ExprKind::series: {
      bool first = true;
      for (const auto& c : e.children) {
        if (!first) out += "; ";
        first = false;
        if (c.kind == ExprKind::series) {
          out += '(';
          format_expr(c, out);
          out += ')';
        } else {
          format_expr(c, out);
        }
      }
      return;
    }
    case ExprKind::prob_choice: {
      out += '[';
      for (std::size_t k = 0; k < e.children.size(); ++k) {
        if (k) out += ", ";
        out += detail::shortest(e.weights[k]);
        out += ": ";
        format_expr(e.children[k], out);
      }
      out += ']';
      return;
    }
    case ExprKind::uniform_choice: {
      out += '<';
      for (std::size_t k = 0; k < e.children.size(); ++k) {
        if (k) out += " | ";
        format_expr(e.children[k], out);
      }
      out += '>';
      return;
    }
  }
}

}  // namespace

SystemSpec parse(const std::string& text) {
  return Parser(text).run();
}

std::string format(const SystemSpec& spec) {
  std::string out;
  for (const auto& [id, cp] : spec.components) {
    out += "comp " + id + "(lambda=" + detail::shortest(cp.lambda) +
           ", t0=" + detail::shortest(cp.t0);
    if (cp.p) out += ", p=" + detail::shortest(*cp.p);
    out += ")\n";
  }
  out += "system: ";
  format_expr(spec.root, out);
  out += '\n';
  return out;
}

model::SystemSpec load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  auto ends_with_json = [](const std::string& p) {
    if (p.size() < 5) return false;
    std::string tail = p.substr(p.size() - 5);
    for (auto& ch : tail) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return tail == ".json";
  };
  return ends_with_json(path) ? from_json(text) : parse(text);
}

model::SystemSpec load_structured(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace relichoice::dsl
