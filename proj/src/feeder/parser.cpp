#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "mphase/feeder/parser.hpp"
#include "schema.hpp"

namespace mphase {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

const char* kind_label(ParseError::Kind kind) {
  switch (kind) {
  case ParseError::Kind::syntax:
    return "syntax error";
  case ParseError::Kind::duplicate_id:
    return "duplicate id";
  case ParseError::Kind::unknown_kind:
    return "unknown kind";
  case ParseError::Kind::unknown_key:
    return "unknown key";
  case ParseError::Kind::matrix_shape_mismatch:
    return "matrix shape mismatch";
  }
  return "error";
}

/// One logical line with the physical position of every byte.
struct LogicalLine {
  std::string text;
  std::vector<SourcePos> pos;
  SourcePos start;
};

std::vector<LogicalLine> split_lines(std::string_view input) {
  std::vector<LogicalLine> lines;
  LogicalLine current;
  bool continuing = false;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (offset <= input.size()) {
    if (offset == input.size() && !continuing)
      break;
    std::size_t end = input.find('\n', offset);
    const bool last = end == std::string_view::npos;
    if (last)
      end = input.size();
    std::string_view physical = input.substr(offset, end - offset);
    ++line_no;
    offset = end + 1;

    if (!physical.empty() && physical.back() == '\r')
      physical.remove_suffix(1);
    if (auto hash = physical.find('#'); hash != std::string_view::npos)
      physical = physical.substr(0, hash);
    std::size_t keep = physical.size();
    while (keep > 0 && is_space(physical[keep - 1]))
      --keep;
    bool continues = keep > 0 && physical[keep - 1] == '\\';

    if (!continuing)
      current = LogicalLine{{}, {}, SourcePos{line_no, 1}};
    else {
      current.text.push_back(' ');
      current.pos.push_back(SourcePos{line_no, 1});
    }
    const std::size_t take = continues ? keep - 1 : physical.size();
    for (std::size_t i = 0; i < take; ++i) {
      current.text.push_back(physical[i]);
      current.pos.push_back(SourcePos{line_no, i + 1});
    }
    continuing = continues;
    if (!continuing)
      lines.push_back(std::move(current));
    if (last)
      break;
  }
  if (continuing)
    lines.push_back(std::move(current));
  return lines;
}

struct Token {
  std::string_view text;
  std::size_t offset; // into the logical line
};

class LineParser {
public:
  explicit LineParser(const LogicalLine& line) : line_(line) {}

  SourcePos at(std::size_t offset) const {
    if (offset < line_.pos.size())
      return line_.pos[offset];
    if (line_.pos.empty())
      return line_.start;
    auto p = line_.pos.back();
    p.column += 1;
    return p;
  }

  [[noreturn]] void fail(ParseError::Kind kind, std::size_t offset, std::string_view token,
                         const std::string& message) const {
    throw ParseError(kind, at(offset), std::string(token), message);
  }

  std::vector<Token> tokenize() const {
    std::vector<Token> tokens;
    const std::string& s = line_.text;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && is_space(s[i]))
        ++i;
      if (i >= s.size())
        break;
      const std::size_t start = i;
      while (i < s.size() && !is_space(s[i])) {
        if (s[i] == '[') {
          const std::size_t open = i;
          const auto close = s.find(']', i);
          if (close == std::string::npos)
            fail(ParseError::Kind::syntax, open, std::string_view(s).substr(open),
                 "unterminated '['");
          i = close;
        }
        ++i;
      }
      tokens.push_back(Token{std::string_view(s).substr(start, i - start), start});
    }
    return tokens;
  }

private:
  const LogicalLine& line_;
};

// Scans an unsigned-or-signed decimal with optional fraction and exponent.
// Returns the end offset, or npos if no number starts at `i`.
std::size_t scan_number(std::string_view s, std::size_t i) {
  std::size_t j = i;
  if (j < s.size() && (s[j] == '+' || s[j] == '-'))
    ++j;
  std::size_t digits = 0;
  while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
    ++j;
    ++digits;
  }
  if (j < s.size() && s[j] == '.') {
    ++j;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
      ++j;
      ++digits;
    }
  }
  if (digits == 0)
    return std::string_view::npos;
  if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
    std::size_t k = j + 1;
    if (k < s.size() && (s[k] == '+' || s[k] == '-'))
      ++k;
    std::size_t exp_digits = 0;
    while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
      ++k;
      ++exp_digits;
    }
    if (exp_digits == 0)
      return std::string_view::npos;
    j = k;
  }
  return j;
}

std::optional<double> to_double(std::string_view text) {
  if (!text.empty() && text.front() == '+')
    text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ptr != text.data() + text.size())
    return std::nullopt;
  if (ec == std::errc::result_out_of_range)
    return std::nullopt;
  if (ec != std::errc())
    return std::nullopt;
  return value;
}

std::optional<double> parse_real(std::string_view text) {
  if (scan_number(text, 0) != text.size())
    return std::nullopt;
  return to_double(text);
}

bool element_end(std::string_view s, std::size_t i) {
  return i >= s.size() || is_space(s[i]) || s[i] == '|';
}

std::size_t skip_space(std::string_view s, std::size_t i) {
  while (i < s.size() && is_space(s[i]))
    ++i;
  return i;
}

std::size_t run_end(std::string_view s, std::size_t i) {
  std::size_t j = i;
  while (!element_end(s, j))
    ++j;
  return j == i ? std::min(s.size(), i + 1) : j;
}

} // namespace

std::string_view kind_name(ElementKind kind) {
  switch (kind) {
  case ElementKind::bus:
    return "bus";
  case ElementKind::line:
    return "line";
  case ElementKind::transformer:
    return "transformer";
  case ElementKind::load:
    return "load";
  case ElementKind::capacitor:
    return "capacitor";
  case ElementKind::regulator:
    return "regulator";
  case ElementKind::dg:
    return "dg";
  case ElementKind::network:
    return "network";
  }
  return "?";
}

ParseError::ParseError(Kind kind, SourcePos pos, std::string token, const std::string& message)
    : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + kind_label(kind) +
            ": " + message + (token.empty() ? std::string() : " near '" + token + "'")),
      kind_(kind), pos_(pos), token_(std::move(token)), detail_(message) {}

BuildError::BuildError(Kind kind, std::string subject, ValidationReport report, SourcePos pos)
    : Error([&] {
        switch (kind) {
        case Kind::unresolved_reference:
          return "unresolved reference: " + subject;
        case Kind::missing_key:
          return "missing key: " + subject;
        case Kind::validation_failed:
          return "validation failed with " + std::to_string(report.size()) + " violation(s)";
        }
        return std::string("build error");
      }()),
      kind_(kind), subject_(std::move(subject)), report_(std::move(report)), pos_(pos) {}

const Property* Declaration::find(std::string_view key) const {
  for (const auto& p : properties)
    if (p.key == key)
      return &p;
  return nullptr;
}

namespace {

class DeclarationParser {
public:
  explicit DeclarationParser(const LineParser& line) : line_(line) {}

  ComplexRows parse_bracketed(const Token& value) {
    // value.text begins with '[' and ends with ']' (tokenizer guarantees the close).
    const std::string_view t = value.text;
    if (t.front() != '[' || t.back() != ']' || t.find(']') != t.size() - 1)
      line_.fail(ParseError::Kind::syntax, value.offset, t, "malformed bracketed value");
    const std::string_view body = t.substr(1, t.size() - 2);
    const std::size_t base = value.offset + 1;

    ComplexRows rows(1);
    std::size_t i = 0;
    while (true) {
      i = skip_space(body, i);
      if (i >= body.size() || body[i] == '|') {
        if (rows.back().empty())
          line_.fail(ParseError::Kind::syntax, base + std::min(i, body.size()),
                     i < body.size() ? body.substr(i, 1) : t, "empty matrix row");
        if (i >= body.size())
          break;
        rows.emplace_back();
        ++i;
        continue;
      }
      rows.back().push_back(parse_complex(body, i, base));
    }
    return rows;
  }

private:
  // Parses one complex literal starting at body[i]; advances i.
  Complex parse_complex(std::string_view body, std::size_t& i, std::size_t base) {
    const std::size_t start = i;
    auto bad = [&](std::size_t at) -> Complex {
      const std::size_t end = run_end(body, at);
      line_.fail(ParseError::Kind::syntax, base + at, body.substr(at, end - at),
                 "invalid complex literal");
    };
    const std::size_t first_end = scan_number(body, start);
    if (first_end == std::string_view::npos)
      return bad(start);
    const double first = *to_double(body.substr(start, first_end - start));
    if (first_end < body.size() && body[first_end] == 'j') {
      i = first_end + 1;
      if (!element_end(body, i))
        return bad(start);
      return {0.0, first};
    }

    const std::size_t sign_at = skip_space(body, first_end);
    if (sign_at < body.size() && (body[sign_at] == '+' || body[sign_at] == '-')) {
      const std::size_t imag_at = skip_space(body, sign_at + 1);
      const bool spaced = sign_at > first_end || imag_at > sign_at + 1;
      const std::size_t imag_end = scan_number(body, imag_at);
      const bool unsigned_imag =
          imag_end != std::string_view::npos && body[imag_at] != '+' && body[imag_at] != '-';
      if (unsigned_imag && imag_end < body.size() && body[imag_end] == 'j') {
        double imag = *to_double(body.substr(imag_at, imag_end - imag_at));
        if (body[sign_at] == '-')
          imag = -imag;
        i = imag_end + 1;
        if (!element_end(body, i))
          return bad(start);
        return {first, imag};
      }
      if (sign_at == first_end)
        return bad(start); // e.g. "1+2" or "1+x"
      if (spaced && imag_at > sign_at + 1)
        return bad(sign_at); // dangling sign
    }
    i = first_end;
    if (!element_end(body, i))
      return bad(start);
    return {first, 0.0};
  }

  const LineParser& line_;
};

} // namespace

FeederDocument parse(std::string_view text) {
  FeederDocument doc;
  std::set<std::pair<ElementKind, std::string>> seen;
  bool have_network = false;

  for (const LogicalLine& logical : split_lines(text)) {
    LineParser line(logical);
    const auto tokens = line.tokenize();
    if (tokens.empty())
      continue;

    const Token& kind_token = tokens[0];
    const auto kind = detail::kind_from_name(lower(kind_token.text));
    if (!kind)
      line.fail(ParseError::Kind::unknown_kind, kind_token.offset, kind_token.text,
                "unknown element kind");
    if (tokens.size() < 2)
      line.fail(ParseError::Kind::syntax, kind_token.offset + kind_token.text.size(), "",
                "missing element id");
    const Token& id_token = tokens[1];
    if (id_token.text.find_first_of("=[]|") != std::string_view::npos)
      line.fail(ParseError::Kind::syntax, id_token.offset, id_token.text, "invalid element id");

    Declaration decl{*kind, std::string(id_token.text), {}, line.at(kind_token.offset)};
    if (!seen.emplace(*kind, decl.id).second)
      line.fail(ParseError::Kind::duplicate_id, id_token.offset, id_token.text,
                "duplicate " + std::string(kind_name(*kind)) + " id");
    if (*kind == ElementKind::network) {
      if (have_network)
        line.fail(ParseError::Kind::syntax, kind_token.offset, kind_token.text,
                  "only one network declaration is allowed");
      have_network = true;
    }

    DeclarationParser values(line);
    std::optional<std::pair<std::size_t, std::size_t>> matrix_rows; // (rows, token offset)
    std::string_view matrix_token;
    for (std::size_t t = 2; t < tokens.size(); ++t) {
      const Token& tok = tokens[t];
      const auto eq = tok.text.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == tok.text.size() ||
          tok.text.substr(0, eq).find_first_of("[]|") != std::string_view::npos)
        line.fail(ParseError::Kind::syntax, tok.offset, tok.text, "expected key=value");
      const std::string key = lower(tok.text.substr(0, eq));
      const auto type = detail::key_type(*kind, key);
      if (!type)
        line.fail(ParseError::Kind::unknown_key, tok.offset, tok.text.substr(0, eq),
                  "unknown key for " + std::string(kind_name(*kind)));
      if (decl.find(key))
        line.fail(ParseError::Kind::syntax, tok.offset, tok.text.substr(0, eq), "duplicate key");

      const Token value{tok.text.substr(eq + 1), tok.offset + eq + 1};
      const SourcePos value_pos = line.at(value.offset);
      auto fail_value = [&](const std::string& message) {
        line.fail(ParseError::Kind::syntax, value.offset, value.text, message);
      };
      const bool bracketed = value.text.front() == '[';
      if (!bracketed && value.text.find_first_of("[]|") != std::string_view::npos)
        fail_value("unexpected bracket or '|'");

      PropertyValue parsed;
      switch (*type) {
      case detail::ValueType::real: {
        auto v = bracketed ? std::nullopt : parse_real(value.text);
        if (!v || !std::isfinite(*v))
          fail_value("expected a number");
        parsed = *v;
        break;
      }
      case detail::ValueType::text:
        if (bracketed)
          fail_value("expected a name");
        parsed = std::string(value.text);
        break;
      case detail::ValueType::boolean: {
        const std::string v = lower(value.text);
        if (v == "true")
          parsed = true;
        else if (v == "false")
          parsed = false;
        else
          fail_value("expected true or false");
        break;
      }
      case detail::ValueType::phases: {
        auto ps = bracketed ? std::nullopt : PhaseSet::parse(value.text);
        if (!ps)
          fail_value("expected a phase set such as abc");
        parsed = *ps;
        break;
      }
      case detail::ValueType::list:
      case detail::ValueType::matrix: {
        ComplexRows rows;
        if (bracketed) {
          rows = values.parse_bracketed(value);
        } else {
          auto v = parse_real(value.text);
          if (!v)
            fail_value("expected a number or bracketed list");
          rows = {{Complex(*v, 0.0)}};
        }
        for (const auto& row : rows)
          for (const auto& z : row)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
              fail_value("values must be finite");
        if (*type == detail::ValueType::list) {
          if (rows.size() != 1)
            fail_value("expected a single row of values");
          for (const auto& z : rows[0])
            if (z.imag() != 0.0)
              fail_value("expected real values");
        } else {
          for (const auto& row : rows)
            if (row.size() != rows.size())
              line.fail(ParseError::Kind::matrix_shape_mismatch, value.offset, value.text,
                        "matrix must be square");
          matrix_rows = std::make_pair(rows.size(), value.offset);
          matrix_token = value.text;
        }
        parsed = std::move(rows);
        break;
      }
      }
      decl.properties.push_back(Property{key, std::move(parsed), value_pos});
    }

    if (matrix_rows) {
      if (const Property* phases = decl.find("phases")) {
        const auto n = std::get<PhaseSet>(phases->value).size();
        if (n != matrix_rows->first)
          line.fail(ParseError::Kind::matrix_shape_mismatch, matrix_rows->second, matrix_token,
                    "matrix has " + std::to_string(matrix_rows->first) + " row(s) but " +
                        std::to_string(n) + " phase(s)");
      }
    }
    doc.declarations.push_back(std::move(decl));
  }
  return doc;
}

PhasedNetwork load_feeder(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return build(parse(buffer.str()));
}

} // namespace mphase
