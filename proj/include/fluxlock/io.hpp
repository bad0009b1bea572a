#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluxlock/coherence.hpp"
#include "fluxlock/fitting.hpp"
#include "fluxlock/flux_geometry.hpp"
#include "fluxlock/spectrum.hpp"

namespace fluxlock {

// All parsers throw Error{malformed_input} on schema violations: missing
// keys, wrong types, bad headers, non-numeric fields.  Writers emit
// locale-independent shortest-round-trip numbers and LF line ends, so output
// for identical inputs is byte-identical.

std::string format_double(double v);

// --- JSON -----------------------------------------------------------------

EnergyParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const EnergyParams& p);

// Accepts either an explicit "alpha" or the pair "l_left_ph"/"l_right_ph".
GradiometerGeometry geometry_from_json(const nlohmann::json& j);
nlohmann::json geometry_to_json(const GradiometerGeometry& g);

DesignCoefficients design_coefficients_from_json(const nlohmann::json& j);
nlohmann::json design_coefficients_to_json(const DesignCoefficients& c);

nlohmann::json fit_result_to_json(const FitResult& r);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// --- CSV ------------------------------------------------------------------

// header: b_ext_ut,freq_ghz,sigma_ghz,m,transition,cooldown
SpectroscopyDataset read_dataset_csv(std::istream& in);
SpectroscopyDataset read_dataset_csv_file(const std::string& path);
void write_dataset_csv(std::ostream& out, const SpectroscopyDataset& data);
void write_dataset_csv_file(const std::string& path,
                            const SpectroscopyDataset& data);

// header: b_ext_ut,freq_ghz,family,transition
void write_curves_csv(std::ostream& out,
                      const std::vector<FamilyCurve>& curves);
void write_curves_csv_file(const std::string& path,
                           const std::vector<FamilyCurve>& curves);

// header: time_us,population
DecayTrace read_trace_csv(std::istream& in);
DecayTrace read_trace_csv_file(const std::string& path);
void write_trace_csv(std::ostream& out, const DecayTrace& trace);
void write_trace_csv_file(const std::string& path, const DecayTrace& trace);

}  // namespace fluxlock
