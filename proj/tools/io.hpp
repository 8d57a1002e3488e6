#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "dirac/harness.hpp"
#include "dirac/oracle.hpp"
#include "dirac/solver.hpp"

namespace dirac::io {

inline constexpr const char* kSweepHeader = "a,E,dE_da_fd,dE_da_hf,hf_residual,orth_residual,w_residual,nodes";
inline constexpr const char* kOracleHeader = "n,j,alpha,E,dE_dalpha";

/// %.17g: round-trips every double.
std::string num(double x);

void write_sweep_csv(std::ostream& os, const std::vector<harness::SweepRecord>& records);
/// Reads rows written by write_sweep_csv; comment lines starting with '#' are skipped.
std::vector<harness::SweepRecord> read_sweep_csv(std::istream& is);

struct OracleRow {
    oracle::CoulombLevel level;
    double E = 0.0;
    double dE_dalpha = 0.0;
};

void write_oracle_csv(std::ostream& os, const std::vector<OracleRow>& rows);

void write_wavefunction_csv(std::ostream& os, const BoundState& state);

nlohmann::json channel_json(const ChannelSpec& channel);
nlohmann::json state_json(const BoundState& state);

} // namespace dirac::io

namespace dirac::harness {

void to_json(nlohmann::json& j, const SweepRecord& r);
void from_json(const nlohmann::json& j, SweepRecord& r);
void to_json(nlohmann::json& j, const Tolerances& t);
void from_json(const nlohmann::json& j, Tolerances& t);
void to_json(nlohmann::json& j, const CheckResult& c);
void from_json(const nlohmann::json& j, CheckResult& c);
void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);

Status parse_status(std::string_view s);

} // namespace dirac::harness

namespace dirac {

SignClass parse_sign_class(std::string_view s);

} // namespace dirac
