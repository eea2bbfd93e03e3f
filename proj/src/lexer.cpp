#include "flucid/lexer.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <set>

namespace flucid {

namespace {

const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> k = {
      "where",  "end",    "dimension", "observation", "evidential", "if",      "then",
      "else",   "fi",     "embed",     "select",      "Box",        "ordered", "unordered",
      "finite", "infinite", "periodic", "nonperiodic", "fby",       "pby",     "wvr",
      "rwvr",   "nwvr",   "nrwvr",     "asa",         "nasa",       "ala",     "nala",
      "upon",   "rupon",  "nupon",     "nrupon",      "first",      "next",    "prev",
      "last",   "second", "prelast",   "nnext",       "nprev",      "iseod",   "isbod",
      "neg",    "not",    "and",       "or",          "xor",        "nand",    "nor",
      "nxor",   "band",   "bor",       "bxor",        "combine",    "product", "bel",
      "pl",     "eod",    "bod",       "true",        "false"};
  return k;
}

const std::set<std::string, std::less<>>& context_ops() {
  static const std::set<std::string, std::less<>> k = {
      "isSubContext", "difference", "intersection", "projection",
      "hiding",       "override",   "union",        "in"};
  return k;
}

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view s) : src_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      bool space = skip_trivia();
      Token t = next();
      t.space_before = space;
      out.push_back(std::move(t));
      if (out.back().kind == TokKind::end) break;
    }
    return out;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;

  char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }
  bool at_end() const { return pos_ >= src_.size(); }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  Span span_from(std::size_t start, int line, std::size_t line_start) const {
    Span s;
    s.line = line;
    s.column = static_cast<int>(start - line_start) + 1;
    s.offset = start;
    s.length = std::max<std::size_t>(1, pos_ - start);
    return s;
  }

  [[noreturn]] void fail(const std::string& code, const std::string& msg, std::size_t start, int line,
                         std::size_t line_start) {
    Diagnostic d;
    d.code = code;
    d.message = msg;
    d.span = span_from(start, line, line_start);
    if (d.span.offset + d.span.length > src_.size() && !src_.empty())
      d.span.length = std::max<std::size_t>(1, src_.size() - std::min(d.span.offset, src_.size() - 1));
    throw SyntaxError(d);
  }
  [[noreturn]] void fail_here(const std::string& code, const std::string& msg) {
    std::size_t start = pos_;
    int line = line_;
    std::size_t ls = line_start_;
    if (!at_end()) ++pos_;
    fail(code, msg, start, line, ls);
  }

  bool only_space_before_on_line() const {
    for (std::size_t i = line_start_; i < pos_; ++i)
      if (src_[i] != ' ' && src_[i] != '\t' && src_[i] != '\r') return false;
    return true;
  }

  bool skip_trivia() {
    bool any = false;
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
        any = true;
      } else if (c == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
        any = true;
      } else if (c == '/' && peek(1) == '*') {
        std::size_t start = pos_;
        int line = line_;
        std::size_t ls = line_start_;
        advance();
        advance();
        while (!(peek() == '*' && peek(1) == '/')) {
          if (at_end()) fail("L003", "unterminated block comment", start, line, ls);
          advance();
        }
        advance();
        advance();
        any = true;
      } else {
        break;
      }
    }
    return any;
  }

  char32_t read_escape(std::size_t start, int line, std::size_t ls) {
    advance();  // backslash
    if (at_end()) fail("L002", "unterminated literal", start, line, ls);
    char e = peek();
    advance();
    switch (e) {
      case 'n': return U'\n';
      case 't': return U'\t';
      case 'r': return U'\r';
      case '0': return U'\0';
      case '\\': return U'\\';
      case '"': return U'"';
      case '\'': return U'\'';
      default: fail("L004", std::string("unknown escape sequence '\\") + e + "'", start, line, ls);
    }
  }

  // one UTF-8 code point
  char32_t read_utf8(std::size_t start, int line, std::size_t ls) {
    auto b0 = static_cast<unsigned char>(peek());
    int extra = b0 < 0x80 ? 0 : (b0 >> 5) == 6 ? 1 : (b0 >> 4) == 14 ? 2 : (b0 >> 3) == 30 ? 3 : -1;
    if (extra < 0) fail("L001", "malformed UTF-8 sequence", start, line, ls);
    char32_t cp = extra == 0 ? b0 : extra == 1 ? (b0 & 0x1f) : extra == 2 ? (b0 & 0x0f) : (b0 & 0x07);
    advance();
    for (int i = 0; i < extra; ++i) {
      auto b = static_cast<unsigned char>(peek());
      if (at_end() || (b >> 6) != 2) fail("L001", "malformed UTF-8 sequence", start, line, ls);
      cp = (cp << 6) | (b & 0x3f);
      advance();
    }
    return cp;
  }

  static void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xc0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xe0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    } else {
      out += static_cast<char>(0xf0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    }
  }

  Token next() {
    Token t;
    std::size_t start = pos_;
    int line = line_;
    std::size_t ls = line_start_;
    auto finish = [&](TokKind k) {
      t.kind = k;
      t.span = span_from(start, line, ls);
      if (t.text.empty()) t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    };

    if (at_end()) {
      t.kind = TokKind::end;
      t.text = "end of input";
      t.span = Span{line, static_cast<int>(pos_ - ls) + 1, pos_, 1};
      return t;
    }
    char c = peek();

    if (ident_start(c)) {
      while (ident_char(peek())) advance();
      std::string word(src_.substr(start, pos_ - start));
      if ((word == "INF") && (peek() == '+' || peek() == '-')) {
        bool pos = peek() == '+';
        advance();
        t.value = pos ? Value::inf_pos() : Value::inf_neg();
        return finish(pos ? TokKind::inf_pos : TokKind::inf_neg);
      }
      if (word == "infinitum") {
        t.value = Value::inf_pos();
        return finish(TokKind::inf_pos);
      }
      t.text = word;
      return finish(is_keyword(word) ? TokKind::keyword : TokKind::ident);
    }

    if (digit(c)) {
      while (digit(peek())) advance();
      bool real = false;
      if (peek() == '.' && digit(peek(1))) {
        real = true;
        advance();
        while (digit(peek())) advance();
      }
      if ((peek() == 'e' || peek() == 'E') &&
          (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
        real = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        while (digit(peek())) advance();
      }
      std::string_view lit = src_.substr(start, pos_ - start);
      if (ident_start(peek())) fail_here("L001", "malformed number literal");
      if (real) {
        double d = 0;
        auto r = std::from_chars(lit.data(), lit.data() + lit.size(), d);
        if (r.ec != std::errc()) fail("L005", "real literal out of range", start, line, ls);
        t.value = Value(d);
        return finish(TokKind::real);
      }
      std::int64_t i = 0;
      auto r = std::from_chars(lit.data(), lit.data() + lit.size(), i);
      if (r.ec != std::errc()) fail("L005", "integer literal out of range", start, line, ls);
      t.value = Value(i);
      return finish(TokKind::integer);
    }

    if (c == '"') {
      advance();
      std::string s;
      while (true) {
        if (at_end() || peek() == '\n') fail("L002", "unterminated string literal", start, line, ls);
        char d = peek();
        if (d == '"') {
          advance();
          break;
        }
        if (d == '\\') {
          append_utf8(s, read_escape(start, line, ls));
        } else {
          append_utf8(s, read_utf8(start, line, ls));
        }
      }
      t.value = Value(s);
      return finish(TokKind::string);
    }

    if (c == '\'') {
      advance();
      if (at_end() || peek() == '\n' || peek() == '\'')
        fail("L002", "malformed character literal", start, line, ls);
      char32_t cp = peek() == '\\' ? read_escape(start, line, ls) : read_utf8(start, line, ls);
      if (peek() != '\'') fail("L002", "unterminated character literal", start, line, ls);
      advance();
      t.value = Value(Char{cp});
      return finish(TokKind::character);
    }

    if (c == '\\') {
      advance();
      if ((peek() == '0' || peek() == 'O') && !ident_char(peek(1))) {
        advance();
        return finish(TokKind::zero_obs);
      }
      if (!ident_start(peek())) fail("L001", "stray '\\'", start, line, ls);
      while (ident_char(peek())) advance();
      std::string word(src_.substr(start + 1, pos_ - start - 1));
      if (!is_context_operator(word)) fail("L001", "unknown context operator '\\" + word + "'", start, line, ls);
      t.text = word;
      return finish(TokKind::ctx_op);
    }

    if (c == '#') {
      if (peek(1) == '#') {
        advance();
        advance();
        return finish(TokKind::punct);
      }
      if (only_space_before_on_line() && peek(1) >= 'A' && peek(1) <= 'Z') {
        std::size_t k = pos_ + 1;
        while (k < src_.size() && ident_char(src_[k])) ++k;
        std::string_view word = src_.substr(pos_ + 1, k - pos_ - 1);
        bool upper = true;
        for (char ch : word)
          if (ch >= 'a' && ch <= 'z') upper = false;
        if (upper && word.size() >= 2) {
          while (pos_ < k) advance();
          fail("L006", "hybrid segments unsupported (#" + std::string(word) + ")", start, line, ls);
        }
      }
      advance();
      return finish(TokKind::punct);
    }

    static const std::array<std::string_view, 8> two = {"=>", "==", "!=", "<=", ">=", "&&", "||", "##"};
    for (auto op : two)
      if (src_.substr(pos_, 2) == op) {
        advance();
        advance();
        return finish(TokKind::punct);
      }
    static const std::string_view single = "()[]{},;:.<>=+-*/%^!@$|";
    if (single.find(c) != std::string_view::npos) {
      advance();
      return finish(TokKind::punct);
    }

    auto uc = static_cast<unsigned char>(c);
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%02X", uc);
    fail_here("L001", std::string("illegal character ") + buf);
  }
};

}  // namespace

bool is_keyword(std::string_view word) { return keywords().count(word) > 0; }
bool is_context_operator(std::string_view word) { return context_ops().count(word) > 0; }

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokKind::end: return "end of input";
    case TokKind::ident: return "identifier '" + t.text + "'";
    case TokKind::keyword: return "'" + t.text + "'";
    case TokKind::integer:
    case TokKind::real: return "number " + t.text;
    case TokKind::string: return "string " + t.text;
    case TokKind::character: return "character " + t.text;
    case TokKind::ctx_op: return "'\\" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

}  // namespace flucid
