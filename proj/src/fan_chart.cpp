#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "sdice/pipeline.hpp"

namespace sdice {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

struct Series {
  std::vector<double> t, lower, mean, upper, deterministic;
};

Series read_band(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("band file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  auto find = [&](std::string_view col) -> std::ptrdiff_t {
    const auto it = std::find(header.begin(), header.end(), col);
    return it == header.end() ? -1 : it - header.begin();
  };
  std::ptrdiff_t lower = -1, upper = -1;
  const std::ptrdiff_t mean = find("mean");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].size() < 2 || header[i][0] != 'q') continue;
    if (mean >= 0 && static_cast<std::ptrdiff_t>(i) < mean && lower < 0) lower = static_cast<std::ptrdiff_t>(i);
    if (mean >= 0 && static_cast<std::ptrdiff_t>(i) > mean) upper = static_cast<std::ptrdiff_t>(i);
  }
  const std::ptrdiff_t t = find("t"), det = find("deterministic");
  const std::pair<const char*, std::ptrdiff_t> required[] = {
      {"t", t}, {"lower quantile", lower}, {"mean", mean}, {"upper quantile", upper}, {"deterministic", det}};
  for (const auto& [what, idx] : required)
    if (idx < 0) throw std::invalid_argument(fmt::format("band file lacks a '{}' column (available: {})", what, join(header)));

  Series s;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw std::invalid_argument(fmt::format("band file row {}: expected {} fields, got {}", row, header.size(), cells.size()));
    auto num = [&](std::ptrdiff_t i) {
      try {
        return std::stod(cells[static_cast<std::size_t>(i)]);
      } catch (const std::exception&) {
        throw std::invalid_argument(fmt::format("band file row {}: '{}' is not a number", row, cells[static_cast<std::size_t>(i)]));
      }
    };
    s.t.push_back(num(t));
    s.lower.push_back(num(lower));
    s.mean.push_back(num(mean));
    s.upper.push_back(num(upper));
    s.deterministic.push_back(num(det));
  }
  if (s.t.empty()) throw std::invalid_argument("band file has no data rows");
  return s;
}

}  // namespace

std::string fan_chart_svg(std::istream& band_csv, std::string_view variable, int base_year,
                          double years_per_period) {
  const Series s = read_band(band_csv);
  constexpr double width = 640, height = 400, left = 70, right = 20, top = 36, bottom = 46;
  const double pw = width - left - right, ph = height - top - bottom;

  const double t0 = s.t.front(), t1 = std::max(s.t.back(), t0 + 1.0);
  double lo = std::min({*std::min_element(s.lower.begin(), s.lower.end()),
                        *std::min_element(s.deterministic.begin(), s.deterministic.end()),
                        *std::min_element(s.mean.begin(), s.mean.end())});
  double hi = std::max({*std::max_element(s.upper.begin(), s.upper.end()),
                        *std::max_element(s.deterministic.begin(), s.deterministic.end()),
                        *std::max_element(s.mean.begin(), s.mean.end())});
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double pad = std::max(1e-3, 0.05 * std::abs(hi));
    lo -= pad;
    hi += pad;
  }
  const double margin = 0.05 * (hi - lo);
  lo -= margin;
  hi += margin;

  auto x = [&](double t) { return left + pw * (t - t0) / (t1 - t0); };
  auto y = [&](double v) { return top + ph * (hi - v) / (hi - lo); };
  auto polyline = [&](const std::vector<double>& v) {
    std::string pts;
    for (std::size_t i = 0; i < v.size(); ++i) pts += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", x(s.t[i]), y(v[i]));
    return pts;
  };

  std::string band;
  for (std::size_t i = 0; i < s.t.size(); ++i) band += fmt::format("{:.2f},{:.2f} ", x(s.t[i]), y(s.upper[i]));
  for (std::size_t i = s.t.size(); i-- > 0;) band += fmt::format("{:.2f},{:.2f} ", x(s.t[i]), y(s.lower[i]));
  band.pop_back();

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n",
      width, height);
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
  svg += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n", left + pw / 2, variable);

  // axes
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left, top, pw, ph);
  for (double t = std::ceil(t0); t <= t1 + 1e-9; t += 1.0) {
    const bool major = static_cast<long>(t) % 5 == 0;
    svg += fmt::format("<line x1=\"{0:.2f}\" x2=\"{0:.2f}\" y1=\"{1}\" y2=\"{2}\" stroke=\"black\"/>\n", x(t), top + ph,
                       top + ph + (major ? 6 : 3));
    if (major)
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x(t), top + ph + 18,
                         base_year + static_cast<long>(std::lround(t * years_per_period)));
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    svg += fmt::format("<line x1=\"{}\" x2=\"{}\" y1=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", left - 5, left, y(v), y(v));
    svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n", left - 8, y(v) + 4, v);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">year</text>\n", left + pw / 2, height - 8);

  svg += fmt::format("<polygon points=\"{}\" fill=\"#b0b0b0\" fill-opacity=\"0.7\" stroke=\"none\"/>\n", band);
  svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>\n", polyline(s.mean));
  svg += fmt::format(
      "<polyline points=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n",
      polyline(s.deterministic));
  svg += "</svg>\n";
  return svg;
}

void render_fan_chart(const std::filesystem::path& band_file, std::string_view variable,
                      const std::filesystem::path& output) {
  if (!parse_variable(variable)) {
    std::vector<std::string> names;
    for (Variable v : kAllVariables) names.emplace_back(name(v));
    throw std::invalid_argument(fmt::format("unknown variable '{}' (available: {})", variable, join(names)));
  }
  std::ifstream in(band_file, std::ios::binary);
  if (!in) throw std::invalid_argument(fmt::format("cannot read band file {}", band_file.string()));
  ModelParams defaults;
  const std::string svg = fan_chart_svg(in, variable, defaults.base_year, defaults.years_per_period);
  if (!output.parent_path().empty()) std::filesystem::create_directories(output.parent_path());
  std::ofstream out(output, std::ios::binary);
  out << svg;
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", output.string()));
}

}  // namespace sdice
