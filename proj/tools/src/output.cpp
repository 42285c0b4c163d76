#include "output.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <system_error>

#include "fluxfsp/error.hpp"

namespace fluxfsp::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

std::string snapshot_filename(double t) {
  char buf[512];
  const auto r = std::to_chars(buf, buf + sizeof buf, t, std::chars_format::fixed);
  if (r.ec != std::errc{}) return "snapshot_" + format_double(t) + ".csv";
  return "snapshot_" + std::string(buf, r.ptr) + ".csv";
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<std::string>& species,
                          std::span<const TrajectoryRow> rows) {
  auto out = open_out(path);
  out << "t,dt,n_states,phi_total,phi_max,phi_out,model_err_bound,step_err_bound";
  for (const auto& s : species) out << ",mean_" << s;
  out << '\n';
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.dt) << ',' << r.n_states << ','
        << format_double(r.phi_total) << ',' << format_double(r.phi_max) << ','
        << format_double(r.phi_out) << ',' << format_double(r.model_error_bound) << ','
        << format_double(r.stepping_error_bound);
    for (double m : r.means) out << ',' << format_double(m);
    out << '\n';
  }
  if (!out) throw ConfigError("failed writing " + path.string());
}

void write_snapshot_csv(const std::filesystem::path& path,
                        const std::vector<std::string>& species, const StateSet& states,
                        std::span<const double> p) {
  std::vector<std::size_t> order(states.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto x = states[a];
    const auto y = states[b];
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  });
  auto out = open_out(path);
  for (const auto& s : species) out << s << ',';
  out << "p\n";
  for (std::size_t i : order) {
    for (Count c : states[i]) out << c << ',';
    out << format_double(p[i]) << '\n';
  }
  if (!out) throw ConfigError("failed writing " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace fluxfsp::cli
