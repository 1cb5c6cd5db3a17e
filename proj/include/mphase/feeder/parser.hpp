#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mphase/feeder/network.hpp"

namespace mphase {

/// Line-oriented `.feeder` text format.
///
///   <kind> <id> key=value key=value ...
///
/// `#` starts a comment, a trailing `\` continues the logical line, blank
/// lines are ignored. Keys are case-insensitive, ids are case-sensitive.
/// Values are reals, unquoted strings, phase sets (`abc`), booleans, or
/// bracketed lists/matrices of complex literals with `|` between rows:
///
///   line l1 from=b1 to=b2 phases=ab z=[0.4576+1.078j 0.156+0.502j | 0.156+0.502j 0.4666+1.048j]

enum class ElementKind { bus, line, transformer, load, capacitor, regulator, dg, network };

std::string_view kind_name(ElementKind kind);

struct SourcePos {
  std::size_t line = 0;   // 1-based
  std::size_t column = 0; // 1-based byte offset in the physical line

  bool operator==(const SourcePos&) const = default;
};

/// Rows of complex entries. A scalar list is a single row.
using ComplexRows = std::vector<std::vector<Complex>>;

using PropertyValue = std::variant<double, std::string, bool, PhaseSet, ComplexRows>;

struct Property {
  std::string key; // lower-cased
  PropertyValue value;
  SourcePos pos;
};

struct Declaration {
  ElementKind kind;
  std::string id;
  std::vector<Property> properties;
  SourcePos pos;

  const Property* find(std::string_view key) const;
};

struct FeederDocument {
  std::vector<Declaration> declarations;
};

class ParseError : public Error {
public:
  enum class Kind { syntax, duplicate_id, unknown_kind, unknown_key, matrix_shape_mismatch };

  ParseError(Kind kind, SourcePos pos, std::string token, const std::string& message);

  Kind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }
  const std::string& token() const { return token_; }
  const std::string& detail() const { return detail_; }

private:
  Kind kind_;
  SourcePos pos_;
  std::string token_;
  std::string detail_;
};

class BuildError : public Error {
public:
  enum class Kind { unresolved_reference, missing_key, validation_failed };

  BuildError(Kind kind, std::string subject, ValidationReport report = {}, SourcePos pos = {});

  Kind kind() const { return kind_; }
  /// Unresolved id, missing key name, or empty for validation failures.
  const std::string& subject() const { return subject_; }
  const ValidationReport& report() const { return report_; }
  /// Declaration or property that caused the error; line 0 for validation failures.
  SourcePos pos() const { return pos_; }

private:
  Kind kind_;
  std::string subject_;
  ValidationReport report_;
  SourcePos pos_;
};

/// Throws ParseError carrying the position of the offending token.
FeederDocument parse(std::string_view text);

/// Resolves references, applies defaults and validates. Throws BuildError.
PhasedNetwork build(const FeederDocument& doc);

/// Canonical text: kinds grouped, ids sorted, fixed key order, shortest
/// round-trip number formatting, LF line endings.
std::string serialize(const PhasedNetwork& network);

/// Reads and parses a file, then builds it.
PhasedNetwork load_feeder(const std::string& path);

/// Formats a double with the shortest representation that round-trips.
std::string format_number(double value);

} // namespace mphase
