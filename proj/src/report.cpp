#include "confdim/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace confdim {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  // shortest representation that round-trips
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = std::strtod(buf, nullptr);
    if (back == v) return buf;
  }
  return buf;
}

Json result_to_json(const ModulusResult& r) {
  Json j;
  j["value"] = format_double(r.value);
  j["p"] = format_double(r.p);
  j["status"] = to_string(r.status);
  j["constraint_count"] = r.active_constraints.size();
  j["separation_calls"] = r.separation_calls;
  j["iterations"] = r.iterations;
  j["bracket"] = {format_double(r.bracket_low), format_double(r.bracket_high)};
  // histogram of positive weights in tenths of the max weight
  std::vector<int> bins(10, 0);
  double mx = r.optimal_density.max_weight();
  int positive = 0;
  if (mx > 0)
    for (double w : r.optimal_density.weights) {
      if (w <= 0) continue;
      ++positive;
      int b = std::min(9, int(std::floor(10.0 * w / mx)));
      ++bins[b];
    }
  j["density_histogram"] = bins;
  j["density_support"] = positive;
  j["density_max"] = format_double(mx);
  return j;
}

std::string csv_header() { return "ifs,k,p,L,value,status,seconds"; }

std::string csv_row(const std::string& ifs_name, int k, double p, double L,
                    const ModulusResult& r, double seconds) {
  std::ostringstream os;
  os << ifs_name << "," << k << "," << format_double(p) << "," << format_double(L) << ","
     << format_double(r.value) << "," << to_string(r.status) << "," << format_double(seconds);
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

Json make_report_skeleton(const std::string& tool, std::uint64_t ifs_hash, const Json& params) {
  Json j;
  j["tool_version"] = "confdim 1.0.0";
  j["tool"] = tool;
  j["ifs_hash"] = ifs_hash;
  j["params"] = params;
  return j;
}

}  // namespace confdim
