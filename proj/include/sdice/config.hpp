#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sdice/params.hpp"

namespace sdice::config {

/// Mutable reference to one configurable scalar.
using FieldRef = std::variant<double*, int*, bool*, std::uint64_t*, std::string*>;

/// Flat list of ("section.key", field) pairs. Sections map onto INI headers.
using FieldList = std::vector<std::pair<std::string, FieldRef>>;

FieldList model_fields(ModelParams& params);

/// Assigns `value` to the field named `key`. Unknown keys and unparsable
/// values raise std::invalid_argument naming the key.
void set_field(const FieldList& fields, std::string_view key, std::string_view value);

std::string get_field(const FieldList& fields, std::string_view key);

/// Reads an INI document. Every key present must be known.
void read_ini(const FieldList& fields, std::istream& in);

/// Writes every field, grouped by section, in declaration order.
void write_ini(const FieldList& fields, std::ostream& out);

/// Splits "section.key=value"; throws on a missing '='.
std::pair<std::string, std::string> split_assignment(std::string_view assignment);

ModelParams load_model_params(std::istream& in);
void save_model_params(const ModelParams& params, std::ostream& out);

}  // namespace sdice::config
