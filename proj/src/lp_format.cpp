#include "emob/lp_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace emob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kWrapColumn = 240;

std::string num(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void emit_term(std::string& out, std::string& line, bool& first, double coef,
               const std::string& name) {
  std::string t;
  if (first) {
    t = " " + num(coef) + " " + name;
    first = false;
  } else if (coef < 0) {
    t = " - " + num(-coef) + " " + name;
  } else {
    t = " + " + num(coef) + " " + name;
  }
  if (line.size() + t.size() > kWrapColumn) {
    out += line;
    out += "\n";
    line = " ";
  }
  line += t;
}

std::string bound_value(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return num(v);
}

}  // namespace

std::vector<std::string> variable_names(const MilpModel& mm) {
  std::vector<std::string> names(static_cast<std::size_t>(mm.model.num_cols()));
  for (const auto& [k, col] : mm.index.x_vars)
    names[col] = "x_" + std::to_string(std::get<0>(k)) + "_" +
                 std::to_string(std::get<1>(k)) + "_" + mode_name(std::get<2>(k));
  for (const auto& [k, col] : mm.index.e_vars)
    names[col] = "e_" + std::to_string(k.first) + "_" + mode_name(k.second);
  for (const auto& [k, col] : mm.index.y_vars)
    names[col] = "y_" + std::to_string(std::get<0>(k)) + "_" +
                 mode_name(std::get<1>(k)) + "_" + mode_name(std::get<2>(k));
  for (const std::string& n : names)
    if (n.empty()) throw std::logic_error("model column missing from the index");
  return names;
}

std::string lp_to_string(const MilpModel& mm) {
  const lp::LinearModel& m = mm.model;
  std::vector<std::string> names = variable_names(mm);

  std::string out = "Minimize\n";
  std::string line = " obj:";
  bool first = true;
  for (int j = 0; j < m.num_cols(); ++j)
    if (m.objective[j] != 0.0) emit_term(out, line, first, m.objective[j], names[j]);
  out += line;
  out += "\n";

  out += "Subject To\n";
  for (int i = 0; i < m.num_rows(); ++i) {
    if (m.rows[i].empty()) throw std::logic_error("cannot export an empty row");
    line = " c" + std::to_string(i) + ":";
    first = true;
    for (const lp::RowEntry& e : m.rows[i])
      emit_term(out, line, first, e.coef, names[e.col]);
    const char* sense = m.senses[i] == lp::Sense::LessEq      ? "<="
                        : m.senses[i] == lp::Sense::GreaterEq ? ">="
                                                              : "=";
    line += std::string(" ") + sense + " " + num(m.rhs[i]);
    out += line;
    out += "\n";
  }

  std::string bounds;
  for (int j = 0; j < m.num_cols(); ++j) {
    if (m.integral[j]) {
      if (m.lower[j] != 0.0 || m.upper[j] != 1.0)
        throw std::logic_error("integer columns must have unit range");
      continue;
    }
    if (m.lower[j] == 0.0 && m.upper[j] == kInf) continue;
    bounds += " " + bound_value(m.lower[j]) + " <= " + names[j] + " <= " +
              bound_value(m.upper[j]) + "\n";
  }
  if (!bounds.empty()) {
    out += "Bounds\n";
    out += bounds;
  }

  std::string binaries;
  for (int j = 0; j < m.num_cols(); ++j)
    if (m.integral[j]) binaries += " " + names[j] + "\n";
  if (!binaries.empty()) {
    out += "Binaries\n";
    out += binaries;
  }

  out += "End\n";
  return out;
}

void export_lp(const MilpModel& mm, const std::string& path) {
  std::string text = lp_to_string(mm);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.flush();
  if (!f) throw IoError("failed writing " + path);
}

namespace {

struct Token {
  enum class Kind { Word, Number, Colon, Plus, Minus, Sense, Eof };
  Kind kind = Kind::Eof;
  std::string text;
  double value = 0.0;
  lp::Sense sense = lp::Sense::Equal;
  int line = 0;
};

class Lexer {
 public:
  Lexer(const std::string& text, const std::string& source)
      : text_(text), source_(source) {}

  [[noreturn]] void fail(int line, const std::string& reason) const {
    throw LpParseError(source_ + ":" + std::to_string(line) + ": " + reason);
  }

  Token next() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
            text_[pos_] == '\n')) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
    Token t;
    t.line = line_;
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    if (c == ':') {
      ++pos_;
      t.kind = Token::Kind::Colon;
    } else if (c == '+') {
      ++pos_;
      t.kind = Token::Kind::Plus;
    } else if (c == '-') {
      ++pos_;
      t.kind = Token::Kind::Minus;
    } else if (c == '<' || c == '>' || c == '=') {
      t.kind = Token::Kind::Sense;
      if (c == '=') {
        ++pos_;
        t.sense = lp::Sense::Equal;
      } else {
        if (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '=')
          fail(line_, std::string("expected '") + c + "='");
        pos_ += 2;
        t.sense = c == '<' ? lp::Sense::LessEq : lp::Sense::GreaterEq;
      }
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        bool exp_sign = (d == '+' || d == '-') && pos_ > start &&
                        (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E');
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' ||
            d == 'E' || exp_sign)
          ++pos_;
        else
          break;
      }
      t.kind = Token::Kind::Number;
      t.text = text_.substr(start, pos_ - start);
      char* end = nullptr;
      t.value = std::strtod(t.text.c_str(), &end);
      if (end != t.text.c_str() + t.text.size())
        fail(line_, "malformed number '" + t.text + "'");
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
      t.kind = Token::Kind::Word;
      t.text = text_.substr(start, pos_ - start);
    } else {
      fail(line_, std::string("unexpected character '") + c + "'");
    }
    return t;
  }

 private:
  const std::string& text_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

class Parser {
 public:
  Parser(const std::string& text, const std::string& source)
      : lex_(text, source) {
    advance();
  }

  LpFile run() {
    expect_word("Minimize");
    parse_objective();
    expect_word("Subject");
    expect_word("To");
    while (cur_.kind == Token::Kind::Word && !is_section(cur_.text)) parse_row();
    if (word_is("Bounds")) {
      advance();
      while (!word_is("Binaries") && !word_is("End")) parse_bound();
    }
    if (word_is("Binaries")) {
      advance();
      while (!word_is("End")) {
        if (cur_.kind != Token::Kind::Word)
          lex_.fail(cur_.line, "expected a variable name in Binaries");
        int c = column(cur_.text);
        out_.model.integral[c] = true;
        out_.model.lower[c] = 0.0;
        out_.model.upper[c] = 1.0;
        advance();
      }
    }
    expect_word("End");
    if (cur_.kind != Token::Kind::Eof)
      lex_.fail(cur_.line, "content after End");
    try {
      out_.model.validate();
    } catch (const std::invalid_argument& e) {
      throw LpParseError(std::string("parsed model invalid: ") + e.what());
    }
    return std::move(out_);
  }

 private:
  static bool is_section(const std::string& w) {
    return w == "Subject" || w == "Bounds" || w == "Binaries" || w == "End";
  }

  bool word_is(const char* w) const {
    return cur_.kind == Token::Kind::Word && cur_.text == w;
  }

  void advance() {
    if (peeked_) {
      cur_ = peek_;
      peeked_ = false;
    } else {
      cur_ = lex_.next();
    }
  }

  void expect_word(const char* w) {
    if (!word_is(w)) lex_.fail(cur_.line, std::string("expected '") + w + "'");
    advance();
  }

  int column(const std::string& name) {
    auto it = out_.columns.find(name);
    if (it != out_.columns.end()) return it->second;
    int c = out_.model.add_column(0.0, 0.0, kInf, false);
    out_.columns.emplace(name, c);
    out_.names.push_back(name);
    return c;
  }

  // expr := ["-"|"+"] term { ("+"|"-") term }, term := [number] word
  std::vector<std::pair<int, double>> parse_expr() {
    std::vector<std::pair<int, double>> terms;
    double sign = 1.0;
    if (cur_.kind == Token::Kind::Minus || cur_.kind == Token::Kind::Plus) {
      sign = cur_.kind == Token::Kind::Minus ? -1.0 : 1.0;
      advance();
    }
    while (true) {
      double coef = sign;
      if (cur_.kind == Token::Kind::Number) {
        coef = sign * cur_.value;
        advance();
      }
      if (cur_.kind != Token::Kind::Word || is_section(cur_.text))
        lex_.fail(cur_.line, "expected a variable name");
      terms.emplace_back(column(cur_.text), coef);
      advance();
      if (cur_.kind == Token::Kind::Plus)
        sign = 1.0;
      else if (cur_.kind == Token::Kind::Minus)
        sign = -1.0;
      else
        break;
      advance();
    }
    return terms;
  }

  void parse_objective() {
    if (word_is("Subject")) return;  // empty objective
    // Optional label.
    if (cur_.kind == Token::Kind::Word && peek_colon()) {
      advance();
      advance();
    }
    if (word_is("Subject")) return;
    for (auto [col, coef] : parse_expr()) {
      if (seen_in_objective_.count(col))
        lex_.fail(cur_.line, "variable repeats in the objective");
      seen_in_objective_.insert(col);
      out_.model.objective[col] = coef;
    }
  }

  void parse_row() {
    int line = cur_.line;
    if (!peek_colon()) lex_.fail(line, "expected 'name:' before a constraint");
    advance();
    advance();
    auto terms = parse_expr();
    if (cur_.kind != Token::Kind::Sense)
      lex_.fail(cur_.line, "expected <=, >= or = after the constraint body");
    lp::Sense sense = cur_.sense;
    advance();
    double rhs_sign = 1.0;
    if (cur_.kind == Token::Kind::Minus) {
      rhs_sign = -1.0;
      advance();
    }
    if (cur_.kind != Token::Kind::Number)
      lex_.fail(cur_.line, "expected a right-hand side value");
    double rhs = rhs_sign * cur_.value;
    advance();
    std::vector<lp::RowEntry> entries;
    entries.reserve(terms.size());
    for (auto [col, coef] : terms) entries.push_back({col, coef});
    try {
      out_.model.add_row(sense, rhs, std::move(entries));
    } catch (const std::invalid_argument& e) {
      lex_.fail(line, e.what());
    }
  }

  double parse_bound_value() {
    double sign = 1.0;
    if (cur_.kind == Token::Kind::Minus) {
      sign = -1.0;
      advance();
    }
    if (word_is("inf")) {
      advance();
      return sign * kInf;
    }
    if (cur_.kind != Token::Kind::Number)
      lex_.fail(cur_.line, "expected a bound value or inf");
    double v = sign * cur_.value;
    advance();
    return v;
  }

  void parse_bound() {
    int line = cur_.line;
    double lo = parse_bound_value();
    if (cur_.kind != Token::Kind::Sense || cur_.sense != lp::Sense::LessEq)
      lex_.fail(cur_.line, "expected <= in a bounds line");
    advance();
    if (cur_.kind != Token::Kind::Word || is_section(cur_.text))
      lex_.fail(cur_.line, "expected a variable name in a bounds line");
    int c = column(cur_.text);
    advance();
    if (cur_.kind != Token::Kind::Sense || cur_.sense != lp::Sense::LessEq)
      lex_.fail(cur_.line, "expected <= in a bounds line");
    advance();
    double hi = parse_bound_value();
    if (lo > hi) lex_.fail(line, "lower bound exceeds upper bound");
    out_.model.lower[c] = lo;
    out_.model.upper[c] = hi;
  }

  bool peek_colon() {
    if (!peeked_) {
      peek_ = lex_.next();
      peeked_ = true;
    }
    return peek_.kind == Token::Kind::Colon;
  }

  Lexer lex_;
  Token cur_;
  Token peek_;
  bool peeked_ = false;
  LpFile out_;
  std::set<int> seen_in_objective_;
};

}  // namespace

LpFile lp_from_string(const std::string& text, const std::string& source) {
  return Parser(text, source).run();
}

LpFile read_lp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("failed reading " + path);
  return lp_from_string(ss.str(), path);
}

}  // namespace emob
