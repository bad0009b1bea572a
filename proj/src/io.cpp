#include "fluxlock/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fluxlock/errors.hpp"

namespace fluxlock {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) {
  throw Error(ErrorCode::malformed_input, msg);
}

double get_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    bad(std::string("missing or non-numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    bad(std::string("bad numeric field for ") + what + ": '" + s + "'");
  }
  return v;
}

int parse_int_field(const std::string& s, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    bad(std::string("bad integer field for ") + what + ": '" + s + "'");
  }
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

EnergyParams params_from_json(const json& j) {
  if (!j.is_object()) bad("parameter JSON must be an object");
  EnergyParams p;
  p.e_j_ghz = get_number(j, "e_j_ghz");
  p.e_c_ghz = get_number(j, "e_c_ghz");
  p.e_l_ghz = get_number(j, "e_l_ghz");
  try {
    p.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  return p;
}

json params_to_json(const EnergyParams& p) {
  return {{"e_j_ghz", p.e_j_ghz}, {"e_c_ghz", p.e_c_ghz},
          {"e_l_ghz", p.e_l_ghz}};
}

GradiometerGeometry geometry_from_json(const json& j) {
  if (!j.is_object()) bad("geometry JSON must be an object");
  GradiometerGeometry g;
  g.area_left_um2 = get_number(j, "area_left_um2");
  g.area_right_um2 = get_number(j, "area_right_um2");
  g.ring_area_um2 = get_number(j, "ring_area_um2");
  if (j.contains("alpha")) {
    g.alpha = get_number(j, "alpha");
  } else if (j.contains("l_left_ph") || j.contains("l_right_ph")) {
    double ll = get_number(j, "l_left_ph");
    double lr = get_number(j, "l_right_ph");
    if (!(ll > 0.0) || !(lr > 0.0)) bad("arm inductances must be positive");
    g.alpha = (lr - ll) / (lr + ll);
  } else {
    bad("geometry needs 'alpha' or 'l_left_ph'/'l_right_ph'");
  }
  if (j.contains("width_asym_um")) {
    g.width_asym_um = get_number(j, "width_asym_um");
  }
  try {
    g.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  return g;
}

json geometry_to_json(const GradiometerGeometry& g) {
  json j = {{"area_left_um2", g.area_left_um2},
            {"area_right_um2", g.area_right_um2},
            {"ring_area_um2", g.ring_area_um2},
            {"alpha", g.alpha}};
  if (g.width_asym_um) j["width_asym_um"] = *g.width_asym_um;
  return j;
}

DesignCoefficients design_coefficients_from_json(const json& j) {
  if (!j.is_object()) bad("design coefficients JSON must be an object");
  DesignCoefficients c;
  c.dl_slope_ph_per_um = get_number(j, "dl_slope_ph_per_um");
  c.dl_intercept_ph = get_number(j, "dl_intercept_ph");
  c.da_half_slope_um2_per_um = get_number(j, "da_half_slope_um2_per_um");
  c.da_half_intercept_um2 = get_number(j, "da_half_intercept_um2");
  c.alpha_slope_pct_per_um = get_number(j, "alpha_slope_pct_per_um");
  c.alpha_intercept_pct = get_number(j, "alpha_intercept_pct");
  c.aeff_slope_um2_per_um = get_number(j, "aeff_slope_um2_per_um");
  c.aeff_intercept_um2 = get_number(j, "aeff_intercept_um2");
  return c;
}

json design_coefficients_to_json(const DesignCoefficients& c) {
  return {{"dl_slope_ph_per_um", c.dl_slope_ph_per_um},
          {"dl_intercept_ph", c.dl_intercept_ph},
          {"da_half_slope_um2_per_um", c.da_half_slope_um2_per_um},
          {"da_half_intercept_um2", c.da_half_intercept_um2},
          {"alpha_slope_pct_per_um", c.alpha_slope_pct_per_um},
          {"alpha_intercept_pct", c.alpha_intercept_pct},
          {"aeff_slope_um2_per_um", c.aeff_slope_um2_per_um},
          {"aeff_intercept_um2", c.aeff_intercept_um2}};
}

json fit_result_to_json(const FitResult& r) {
  json estimates, sigmas;
  auto est = r.estimates.to_array();
  auto sig = r.sigmas.to_array();
  for (int i = 0; i < FitParams::kCount; ++i) {
    estimates[FitParams::names()[i]] = est[i];
    sigmas[FitParams::names()[i]] = sig[i];
  }
  json cov = json::array();
  for (int i = 0; i < FitParams::kCount; ++i) {
    json row = json::array();
    for (int j = 0; j < FitParams::kCount; ++j) row.push_back(r.covariance(i, j));
    cov.push_back(row);
  }
  return {{"estimates", estimates},
          {"sigmas", sigmas},
          {"covariance", cov},
          {"chi2", r.chi2},
          {"n_points", r.n_points},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"at_bound", r.at_bound},
          {"eigen_dim", r.eigen_dim},
          {"chi2_trace", r.chi2_trace}};
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    bad("JSON parse error in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::invalid_value, "cannot write '" + path + "'");
  }
  out << j.dump(2) << '\n';
}

SpectroscopyDataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad("empty dataset file");
  if (strip_cr(line) != "b_ext_ut,freq_ghz,sigma_ghz,m,transition,cooldown") {
    bad("bad dataset header: '" + line + "'");
  }
  SpectroscopyDataset data;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 6) {
      bad("line " + std::to_string(lineno) + ": expected 6 fields");
    }
    SpectroRecord rec;
    rec.b_ut = parse_double(f[0], "b_ext_ut");
    rec.freq_ghz = parse_double(f[1], "freq_ghz");
    rec.sigma_ghz = parse_double(f[2], "sigma_ghz");
    rec.m = parse_int_field(f[3], "m");
    rec.transition = f[4];
    rec.cooldown = f[5];
    if (rec.transition.empty() || rec.cooldown.empty()) {
      bad("line " + std::to_string(lineno) + ": empty transition/cooldown");
    }
    data.records.push_back(std::move(rec));
  }
  data.validate();
  return data;
}

SpectroscopyDataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open '" + path + "'");
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const SpectroscopyDataset& data) {
  out << "b_ext_ut,freq_ghz,sigma_ghz,m,transition,cooldown\n";
  for (const auto& rec : data.records) {
    out << format_double(rec.b_ut) << ',' << format_double(rec.freq_ghz) << ','
        << format_double(rec.sigma_ghz) << ',' << rec.m << ','
        << rec.transition << ',' << rec.cooldown << '\n';
  }
}

void write_dataset_csv_file(const std::string& path,
                            const SpectroscopyDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::invalid_value, "cannot write '" + path + "'");
  }
  write_dataset_csv(out, data);
}

void write_curves_csv(std::ostream& out,
                      const std::vector<FamilyCurve>& curves) {
  out << "b_ext_ut,freq_ghz,family,transition\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << format_double(p.b_ut) << ',' << format_double(p.freq_ghz) << ','
          << c.family << ',' << c.transition << '\n';
    }
  }
}

void write_curves_csv_file(const std::string& path,
                           const std::vector<FamilyCurve>& curves) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::invalid_value, "cannot write '" + path + "'");
  }
  write_curves_csv(out, curves);
}

DecayTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad("empty trace file");
  if (strip_cr(line) != "time_us,population") {
    bad("bad trace header: '" + line + "'");
  }
  DecayTrace trace;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 2) {
      bad("line " + std::to_string(lineno) + ": expected 2 fields");
    }
    trace.samples.push_back(
        {parse_double(f[0], "time_us"), parse_double(f[1], "population")});
  }
  trace.validate();
  return trace;
}

DecayTrace read_trace_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open '" + path + "'");
  return read_trace_csv(in);
}

void write_trace_csv(std::ostream& out, const DecayTrace& trace) {
  out << "time_us,population\n";
  for (const auto& s : trace.samples) {
    out << format_double(s.time_us) << ',' << format_double(s.population)
        << '\n';
  }
}

void write_trace_csv_file(const std::string& path, const DecayTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::invalid_value, "cannot write '" + path + "'");
  }
  write_trace_csv(out, trace);
}

}  // namespace fluxlock
