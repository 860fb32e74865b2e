#include "sdice/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace sdice::config {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* what) {
  throw std::invalid_argument(fmt::format("config key '{}': cannot parse '{}' as {}", key, value, what));
}

template <class T>
T parse_number(std::string_view key, const std::string& value, const char* what) {
  T out{};
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) bad_value(key, value, what);
  return out;
}

bool parse_bool(std::string_view key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "boolean");
}

const FieldRef& find(const FieldList& fields, std::string_view key) {
  for (const auto& [name, ref] : fields)
    if (name == key) return ref;
  throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
}

}  // namespace

FieldList model_fields(ModelParams& p) {
  auto& c = p.controls;
  return {
      {"time.years_per_period", &p.years_per_period},
      {"time.periods", &p.periods},
      {"time.base_year", &p.base_year},
      {"preferences.risk_aversion", &p.risk_aversion},
      {"preferences.discount_rate", &p.discount_rate},
      {"production.capital_share", &p.capital_share},
      {"production.depreciation", &p.depreciation},
      {"production.capital0", &p.capital0},
      {"population.initial", &p.population0},
      {"population.asymptote", &p.population_asymptote},
      {"population.adjustment", &p.population_adjustment},
      {"productivity.initial", &p.productivity0},
      {"productivity.growth0", &p.productivity_growth0},
      {"productivity.decline", &p.productivity_decline},
      {"emissions.industrial0", &p.emissions0},
      {"emissions.output0", &p.output0},
      {"emissions.sigma_growth0", &p.sigma_growth0},
      {"emissions.sigma_decline", &p.sigma_decline},
      {"emissions.land0", &p.land_emissions0},
      {"emissions.land_decline", &p.land_emissions_decline},
      {"carbon.co2_per_carbon", &p.co2_per_carbon},
      {"carbon.flow_at_up", &p.carbon_flow_at_up},
      {"carbon.flow_up_lo", &p.carbon_flow_up_lo},
      {"carbon.eq_at", &p.carbon_eq_at},
      {"carbon.eq_up", &p.carbon_eq_up},
      {"carbon.eq_lo", &p.carbon_eq_lo},
      {"carbon.initial_at", &p.carbon0[0]},
      {"carbon.initial_up", &p.carbon0[1]},
      {"carbon.initial_lo", &p.carbon0[2]},
      {"climate.xi1", &p.xi1},
      {"climate.xi3", &p.xi3},
      {"climate.xi4", &p.xi4},
      {"climate.forcing_per_doubling", &p.forcing_per_doubling},
      {"climate.sensitivity", &p.climate_sensitivity},
      {"climate.initial_at", &p.temperature0[0]},
      {"climate.initial_lo", &p.temperature0[1]},
      {"climate.other_forcing_start", &p.other_forcing_start},
      {"climate.other_forcing_end", &p.other_forcing_end},
      {"climate.other_forcing_periods", &p.other_forcing_periods},
      {"damage.coefficient", &p.damage_coefficient},
      {"damage.abatement_exponent", &p.abatement_exponent},
      {"damage.backstop_price", &p.backstop_price},
      {"damage.backstop_decline", &p.backstop_decline},
      {"controls.mu_max", &c.mu_max},
      {"controls.mu_max_late", &c.mu_max_late},
      {"controls.late_period", &c.late_period},
      {"controls.savings_min", &c.savings_min},
      {"controls.savings_max", &c.savings_max},
      {"controls.initial_mu", &c.initial_mu},
      {"controls.fix_initial_mu", &c.fix_initial_mu},
  };
}

void set_field(const FieldList& fields, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  std::visit(
      [&](auto* ptr) {
        using T = std::remove_pointer_t<decltype(ptr)>;
        if constexpr (std::is_same_v<T, double>) {
          *ptr = parse_number<double>(key, value, "number");
        } else if constexpr (std::is_same_v<T, int>) {
          *ptr = parse_number<int>(key, value, "integer");
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          *ptr = parse_number<std::uint64_t>(key, value, "unsigned integer");
        } else if constexpr (std::is_same_v<T, bool>) {
          *ptr = parse_bool(key, value);
        } else {
          *ptr = value;
        }
      },
      find(fields, key));
}

std::string get_field(const FieldList& fields, std::string_view key) {
  return std::visit(
      [](auto* ptr) -> std::string {
        using T = std::remove_pointer_t<decltype(ptr)>;
        if constexpr (std::is_same_v<T, bool>) {
          return *ptr ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return *ptr;
        } else {
          return fmt::format("{}", *ptr);
        }
      },
      find(fields, key));
}

void read_ini(const FieldList& fields, std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(fmt::format("malformed config (line {}): {}", e.line(), e.message()));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw std::invalid_argument(fmt::format("config key '{}' is outside a section", section));
    for (const auto& [key, node] : body) set_field(fields, section + "." + key, node.data());
  }
}

void write_ini(const FieldList& fields, std::ostream& out) {
  std::string current;
  for (const auto& [name, ref] : fields) {
    const auto dot = name.find('.');
    const auto section = name.substr(0, dot);
    if (section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << section << "]\n";
      current = section;
    }
    out << name.substr(dot + 1) << " = " << get_field(fields, name) << '\n';
  }
}

std::pair<std::string, std::string> split_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw std::invalid_argument(fmt::format("expected key=value, got '{}'", assignment));
  return {trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1))};
}

ModelParams load_model_params(std::istream& in) {
  ModelParams p;
  read_ini(model_fields(p), in);
  p.validate();
  return p;
}

void save_model_params(const ModelParams& params, std::ostream& out) {
  ModelParams copy = params;
  write_ini(model_fields(copy), out);
}

}  // namespace sdice::config
