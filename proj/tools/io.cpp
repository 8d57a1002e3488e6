#include "io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "dirac/errors.hpp"

namespace dirac::io {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_sweep_csv(std::ostream& os, const std::vector<harness::SweepRecord>& records) {
    os << kSweepHeader << '\n';
    for (const auto& r : records)
        os << num(r.a) << ',' << num(r.E) << ',' << num(r.dE_fd) << ',' << num(r.dE_hf) << ',' << num(r.hf_residual)
           << ',' << num(r.orth_residual) << ',' << num(r.w_residual) << ',' << r.nodes << '\n';
}

std::vector<harness::SweepRecord> read_sweep_csv(std::istream& is) {
    std::vector<harness::SweepRecord> out;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != kSweepHeader) throw ConfigError("unexpected sweep CSV header: " + line);
            header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 8) throw ConfigError("malformed sweep CSV row: " + line);
        harness::SweepRecord r;
        try {
            r.a = std::stod(cells[0]);
            r.E = std::stod(cells[1]);
            r.dE_fd = std::stod(cells[2]);
            r.dE_hf = std::stod(cells[3]);
            r.hf_residual = std::stod(cells[4]);
            r.orth_residual = std::stod(cells[5]);
            r.w_residual = std::stod(cells[6]);
            r.nodes = std::stoi(cells[7]);
        } catch (const std::logic_error&) {
            throw ConfigError("malformed sweep CSV row: " + line);
        }
        out.push_back(r);
    }
    return out;
}

void write_oracle_csv(std::ostream& os, const std::vector<OracleRow>& rows) {
    os << kOracleHeader << '\n';
    for (const auto& r : rows)
        os << r.level.n << ',' << num(r.level.j) << ',' << num(r.level.alpha) << ',' << num(r.E) << ','
           << num(r.dE_dalpha) << '\n';
}

void write_wavefunction_csv(std::ostream& os, const BoundState& state) {
    os << "r,psi1,psi2\n";
    for (std::size_t i = 0; i < state.grid.size(); ++i)
        os << num(state.grid.r[i]) << ',' << num(state.psi1[i]) << ',' << num(state.psi2[i]) << '\n';
}

nlohmann::json channel_json(const ChannelSpec& channel) {
    nlohmann::json j{{"d", channel.d}, {"k", channel.k()}, {"mass", channel.mass}};
    if (channel.tau) j["tau"] = *channel.tau;
    if (channel.j) j["j"] = *channel.j;
    if (channel.parity) j["parity"] = std::string(to_string(*channel.parity));
    return j;
}

nlohmann::json state_json(const BoundState& s) {
    return {{"family", s.family.describe()},
            {"channel", channel_json(s.channel)},
            {"E", s.E},
            {"nodes", s.nodes},
            {"nodes_psi2", s.nodes_psi2},
            {"norm_residual", s.norm_residual},
            {"match_residual", s.match_residual},
            {"r_match", s.r_match},
            {"n_grid", s.grid.size()},
            {"r_max", s.grid.r.back()}};
}

} // namespace dirac::io

namespace dirac::harness {

void to_json(nlohmann::json& j, const SweepRecord& r) {
    j = {{"a", r.a},
         {"E", r.E},
         {"dE_da_fd", r.dE_fd},
         {"dE_da_hf", r.dE_hf},
         {"hf_residual", r.hf_residual},
         {"orth_residual", r.orth_residual},
         {"w_residual", r.w_residual},
         {"nodes", r.nodes}};
}

void from_json(const nlohmann::json& j, SweepRecord& r) {
    j.at("a").get_to(r.a);
    j.at("E").get_to(r.E);
    j.at("dE_da_fd").get_to(r.dE_fd);
    j.at("dE_da_hf").get_to(r.dE_hf);
    j.at("hf_residual").get_to(r.hf_residual);
    j.at("orth_residual").get_to(r.orth_residual);
    j.at("w_residual").get_to(r.w_residual);
    j.at("nodes").get_to(r.nodes);
}

void to_json(nlohmann::json& j, const Tolerances& t) {
    j = {{"hf_rel", t.hf_rel}, {"hf_abs", t.hf_abs}, {"orth", t.orth}, {"w", t.w}, {"sign", t.sign}};
}

void from_json(const nlohmann::json& j, Tolerances& t) {
    j.at("hf_rel").get_to(t.hf_rel);
    j.at("hf_abs").get_to(t.hf_abs);
    j.at("orth").get_to(t.orth);
    j.at("w").get_to(t.w);
    j.at("sign").get_to(t.sign);
}

Status parse_status(std::string_view s) {
    for (Status st : {Status::Pass, Status::Fail, Status::NotApplicable})
        if (to_string(st) == s) return st;
    throw ConfigError("unknown status '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const CheckResult& c) {
    j = {{"check", c.check}, {"status", to_string(c.status)}, {"worst", c.worst}, {"message", c.message}};
}

void from_json(const nlohmann::json& j, CheckResult& c) {
    j.at("check").get_to(c.check);
    c.status = parse_status(j.at("status").get<std::string>());
    j.at("worst").get_to(c.worst);
    j.at("message").get_to(c.message);
}

void to_json(nlohmann::json& j, const Verdict& v) {
    j = {{"check", v.check},
         {"hypothesis", to_string(v.hypothesis)},
         {"conclusion", to_string(v.conclusion)},
         {"strictly_monotone", v.strictly_monotone},
         {"max_hf_residual", v.max_hf_residual},
         {"max_orth_residual", v.max_orth_residual},
         {"max_w_residual", v.max_w_residual},
         {"status", to_string(v.status)},
         {"tolerances", v.tolerances},
         {"message", v.message}};
}

void from_json(const nlohmann::json& j, Verdict& v) {
    j.at("check").get_to(v.check);
    v.hypothesis = parse_sign_class(j.at("hypothesis").get<std::string>());
    v.conclusion = parse_sign_class(j.at("conclusion").get<std::string>());
    j.at("strictly_monotone").get_to(v.strictly_monotone);
    j.at("max_hf_residual").get_to(v.max_hf_residual);
    j.at("max_orth_residual").get_to(v.max_orth_residual);
    j.at("max_w_residual").get_to(v.max_w_residual);
    v.status = parse_status(j.at("status").get<std::string>());
    j.at("tolerances").get_to(v.tolerances);
    j.at("message").get_to(v.message);
}

} // namespace dirac::harness

namespace dirac {

SignClass parse_sign_class(std::string_view s) {
    for (SignClass c : {SignClass::NonNegative, SignClass::NonPositive, SignClass::Indefinite})
        if (to_string(c) == s) return c;
    throw ConfigError("unknown sign class '" + std::string(s) + "'");
}

} // namespace dirac
