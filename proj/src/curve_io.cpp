#include "unred/curve_io.hpp"

#include "unred/error.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace unred {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

Point parse_pair(std::string_view line, const std::string& where) {
  const auto comma = line.find(',');
  double x = 0.0;
  double y = 0.0;
  if (comma == std::string_view::npos || !parse_number(line.substr(0, comma), x) ||
      !parse_number(line.substr(comma + 1), y)) {
    throw ValidationError(where + ": expected \"x,y\", got \"" + std::string(line) + "\"");
  }
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw ValidationError(where + ": non-finite coordinate");
  }
  return Point(x, y);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

ClosedCurve parse_curve(std::istream& in, const std::string& source) {
  Points pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    pts.push_back(parse_pair(body, source + ":" + std::to_string(line_no)));
  }
  try {
    return ClosedCurve(std::move(pts));
  } catch (const Error& e) {
    rethrow_with_context(e, source);
  }
}

ClosedCurve read_curve_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_curve(in, path.string());
}

void write_curve(std::ostream& out, const ClosedCurve& curve) {
  for (const Point& p : curve.points()) out << format_double(p.x()) << ',' << format_double(p.y()) << '\n';
}

void write_curve_file(const std::filesystem::path& path, const ClosedCurve& curve) {
  auto out = open_output(path);
  write_curve(out, curve);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
  const GridSpec& g = cp.field.grid();
  nlohmann::ordered_json header = {
      {"n_t", g.n_t},
      {"n_x", g.n_x},
      {"dt", g.dt},
      {"dx", g.dx},
      {"nodes", g.nodes},
      {"operator", cp.operator_name},
      {"operator_parameter", cp.operator_parameter},
      {"iteration", cp.iteration},
      {"action", cp.action},
  };
  auto out = open_output(path);
  out << header.dump() << '\n';
  for (const ClosedCurve& c : cp.field.curves()) write_curve(out, c);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty checkpoint");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ":1: bad checkpoint header: " + e.what());
  }
  GridSpec g;
  try {
    g.n_t = header.at("n_t").get<std::size_t>();
    g.n_x = header.at("n_x").get<std::size_t>();
    g.dt = header.at("dt").get<double>();
    g.dx = header.at("dx").get<double>();
    g.nodes = header.at("nodes").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ":1: bad checkpoint header: " + e.what());
  }
  g.validate();

  std::vector<ClosedCurve> curves;
  curves.reserve(g.sites());
  std::size_t line_no = 1;
  for (std::size_t site = 0; site < g.sites(); ++site) {
    Points pts;
    pts.reserve(g.nodes);
    while (pts.size() < g.nodes) {
      if (!std::getline(in, line)) {
        throw ValidationError(path.string() + ": checkpoint truncated at site " +
                              std::to_string(site));
      }
      ++line_no;
      pts.push_back(parse_pair(trim(line), path.string() + ":" + std::to_string(line_no)));
    }
    curves.emplace_back(std::move(pts));
  }
  Checkpoint cp{SpaceTimeField(g, std::move(curves)), header.value("operator", std::string()),
                header.value("operator_parameter", 0.0), header.value("iteration", std::size_t{0}),
                header.value("action", 0.0)};
  return cp;
}

}  // namespace unred
