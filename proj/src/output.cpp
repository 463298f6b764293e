#include <charconv>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "catqfi/bench.hpp"

namespace catqfi::bench {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, end);
}

namespace {

// JSON carries the same rounded values as the CSV; non-finite becomes null.
nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  double r = 0;
  const std::string s = format_number(v);
  std::from_chars(s.data(), s.data() + s.size(), r);
  return r;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows)
    os << r.figure << ',' << r.family << ',' << format_number(r.alpha) << ',' << format_number(r.beta) << ','
       << r.n_components << ',' << format_number(r.transmission) << ',' << format_number(r.n_av) << ','
       << format_number(r.qfi) << ',' << format_number(r.delta_phi) << ',' << to_string(r.path) << '\n';
}

void write_json(std::ostream& os, const std::vector<SweepRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"figure", r.figure},
                   {"family", r.family},
                   {"alpha", json_number(r.alpha)},
                   {"beta", json_number(r.beta)},
                   {"n_components", r.n_components},
                   {"transmission", json_number(r.transmission)},
                   {"n_av", json_number(r.n_av)},
                   {"qfi", json_number(r.qfi)},
                   {"delta_phi", json_number(r.delta_phi)},
                   {"path", to_string(r.path)}});
  os << out.dump(1) << '\n';
}

void write_report(std::ostream& os, const VerifyReport& r, bool failures_only) {
  for (const auto& c : r.checks) {
    if (failures_only && c.passed) continue;
    os << (c.passed ? "ok   " : "FAIL ") << c.name << " [" << c.params << "] closed=" << format_number(c.closed)
       << " numeric=" << format_number(c.numeric) << " err=" << format_number(c.error)
       << " tol=" << format_number(c.tolerance);
    if (!c.message.empty()) os << " (" << c.message << ")";
    os << '\n';
  }
  os << "mandel ratio F/N_av vs 4(1+Q):\n";
  for (const auto& m : r.mandel)
    os << "  N=" << m.n_components << " alpha=" << format_number(m.alpha) << " F/N_av=" << format_number(m.qfi_over_nav)
       << " 4(1+Q)=" << format_number(m.four_one_plus_q)
       << " gap=" << format_number(m.qfi_over_nav - m.four_one_plus_q) << '\n';
  os << r.checks.size() << " checks over " << r.points << " parameter points, " << r.failures() << " failed, "
     << format_number(r.seconds) << " s\n";
}

void write_report_json(std::ostream& os, const VerifyReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"params", c.params},
                      {"closed", json_number(c.closed)},
                      {"numeric", json_number(c.numeric)},
                      {"error", json_number(c.error)},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed},
                      {"message", c.message}});
  nlohmann::json mandel = nlohmann::json::array();
  for (const auto& m : r.mandel)
    mandel.push_back({{"n_components", m.n_components},
                      {"alpha", m.alpha},
                      {"qfi_over_nav", json_number(m.qfi_over_nav)},
                      {"four_one_plus_q", json_number(m.four_one_plus_q)}});
  nlohmann::json out{{"passed", r.passed()},
                     {"failures", r.failures()},
                     {"points", r.points},
                     {"seconds", r.seconds},
                     {"checks", checks},
                     {"mandel", mandel}};
  os << out.dump(1) << '\n';
}

}  // namespace catqfi::bench
