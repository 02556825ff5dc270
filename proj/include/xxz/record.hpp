#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xxz/core.hpp"

namespace xxz {

using json = nlohmann::json;

inline json complex_to_json(cplx z) { return json{{"im", z.imag()}, {"re", z.real()}}; }

inline cplx complex_from_json(const json& j) { return {j.at("re").get<double>(), j.at("im").get<double>()}; }

inline json complex_list_to_json(const std::vector<cplx>& v) {
    json arr = json::array();
    for (cplx z : v) arr.push_back(complex_to_json(z));
    return arr;
}

inline std::vector<cplx> complex_list_from_json(const json& j) {
    std::vector<cplx> out;
    for (const auto& e : j) out.push_back(complex_from_json(e));
    return out;
}

/// Everything the library knows about one model, in a form that rebuilds it.
inline json params_to_json(const ModelParams& p) {
    return json{{"n", p.n},
                {"two_s", p.two_s},
                {"r", p.r},
                {"q", p.q},
                {"case", std::string(to_string(p.bcase))},
                {"free_alpha_side", std::string(to_string(p.free_alpha_side))},
                {"free_beta_side", std::string(to_string(p.free_beta_side))},
                {"alpha_minus", complex_to_json(p.alpha_minus)},
                {"alpha_plus", complex_to_json(p.alpha_plus)},
                {"beta_minus", complex_to_json(p.beta_minus)},
                {"beta_plus", complex_to_json(p.beta_plus)},
                {"theta_minus", complex_to_json(p.theta_minus)},
                {"theta_plus", complex_to_json(p.theta_plus)}};
}

inline BoundaryCase boundary_case_from_string(const std::string& s) {
    if (s == "alpha_beta") return BoundaryCase::Case1AlphaBeta;
    if (s == "alpha_alpha") return BoundaryCase::Case2AlphaAlpha;
    if (s == "beta_beta") return BoundaryCase::Case3BetaBeta;
    throw Error(ErrorKind::InvalidParams, "unknown case '" + s + "' (expected alpha_beta, alpha_alpha, beta_beta)");
}

inline Side side_from_string(const std::string& s) {
    if (s == "minus") return Side::Minus;
    if (s == "plus") return Side::Plus;
    throw Error(ErrorKind::InvalidParams, "unknown side '" + s + "' (expected minus or plus)");
}

inline ModelParams params_from_json(const json& j) {
    ModelParams p;
    p.n = j.at("n").get<int>();
    p.two_s = j.at("two_s").get<int>();
    p.r = j.at("r").get<int>();
    p.q = j.at("q").get<int>();
    p.bcase = boundary_case_from_string(j.at("case").get<std::string>());
    p.free_alpha_side = side_from_string(j.at("free_alpha_side").get<std::string>());
    p.free_beta_side = side_from_string(j.at("free_beta_side").get<std::string>());
    p.alpha_minus = complex_from_json(j.at("alpha_minus"));
    p.alpha_plus = complex_from_json(j.at("alpha_plus"));
    p.beta_minus = complex_from_json(j.at("beta_minus"));
    p.beta_plus = complex_from_json(j.at("beta_plus"));
    p.theta_minus = complex_from_json(j.at("theta_minus"));
    p.theta_plus = complex_from_json(j.at("theta_plus"));
    return p;
}

/// One energy level of a run.
struct LevelRecord {
    int index = 0;
    cplx energy{};
    std::optional<cplx> reference;  // the level it was paired with, if any
    double deviation = 0.0;
    std::vector<cplx> roots;
    double max_residual = 0.0;
    std::string method;

    bool operator==(const LevelRecord&) const = default;
};

/// Non-reproducible run metadata, kept out of the canonical payload.
struct RunMeta {
    double wall_time_s = 0.0;
    std::string version;
    std::string timestamp;

    bool operator==(const RunMeta&) const = default;
};

struct RunRecord {
    std::string command;
    std::string status = "ok";
    json config_echo = json::object();
    std::vector<LevelRecord> levels;
    std::vector<int> pairing;
    std::vector<int> unmatched;
    double max_deviation = 0.0;
    std::map<std::string, double> residuals;
    std::vector<std::string> notes;
    RunMeta meta;

    bool operator==(const RunRecord&) const = default;
};

inline json level_to_json(const LevelRecord& l) {
    json j{{"index", l.index},
           {"energy", complex_to_json(l.energy)},
           {"deviation", l.deviation},
           {"roots", complex_list_to_json(l.roots)},
           {"max_residual", l.max_residual},
           {"method", l.method}};
    j["reference"] = l.reference ? complex_to_json(*l.reference) : json(nullptr);
    return j;
}

inline LevelRecord level_from_json(const json& j) {
    LevelRecord l;
    l.index = j.at("index").get<int>();
    l.energy = complex_from_json(j.at("energy"));
    if (!j.at("reference").is_null()) l.reference = complex_from_json(j.at("reference"));
    l.deviation = j.at("deviation").get<double>();
    l.roots = complex_list_from_json(j.at("roots"));
    l.max_residual = j.at("max_residual").get<double>();
    l.method = j.at("method").get<std::string>();
    return l;
}

/// The part of a record that depends only on the config and the build.
inline json canonical_json(const RunRecord& r) {
    json levels = json::array();
    for (const auto& l : r.levels) levels.push_back(level_to_json(l));
    return json{{"command", r.command},     {"status", r.status},       {"config", r.config_echo},
                {"levels", levels},         {"pairing", r.pairing},     {"unmatched", r.unmatched},
                {"max_deviation", r.max_deviation}, {"residuals", r.residuals}, {"notes", r.notes}};
}

inline json to_json(const RunRecord& r) {
    return json{{"canonical", canonical_json(r)},
                {"meta",
                 {{"wall_time_s", r.meta.wall_time_s},
                  {"version", r.meta.version},
                  {"timestamp", r.meta.timestamp}}}};
}

inline RunRecord record_from_json(const json& j) {
    const json& c = j.at("canonical");
    RunRecord r;
    r.command = c.at("command").get<std::string>();
    r.status = c.at("status").get<std::string>();
    r.config_echo = c.at("config");
    for (const auto& l : c.at("levels")) r.levels.push_back(level_from_json(l));
    r.pairing = c.at("pairing").get<std::vector<int>>();
    r.unmatched = c.at("unmatched").get<std::vector<int>>();
    r.max_deviation = c.at("max_deviation").get<double>();
    r.residuals = c.at("residuals").get<std::map<std::string, double>>();
    r.notes = c.at("notes").get<std::vector<std::string>>();
    if (j.contains("meta")) {
        const json& m = j.at("meta");
        r.meta.wall_time_s = m.at("wall_time_s").get<double>();
        r.meta.version = m.at("version").get<std::string>();
        r.meta.timestamp = m.at("timestamp").get<std::string>();
    }
    return r;
}

enum class RecordFormat { Json, Csv };

/// JSON (sorted keys; doubles printed in shortest round-trip form) or CSV.
inline std::string serialize(const RunRecord& r, RecordFormat fmt) {
    if (fmt == RecordFormat::Json) return to_json(r).dump(2) + "\n";
    std::ostringstream os;
    os << std::setprecision(17);
    os << "index,E_re,E_im,deviation\n";
    for (const auto& l : r.levels) os << l.index << ',' << l.energy.real() << ',' << l.energy.imag() << ',' << l.deviation << '\n';
    return os.str();
}

inline RunRecord deserialize_json(const std::string& text) { return record_from_json(json::parse(text)); }

/// 64-bit FNV-1a of the canonical config dump, as 16 hex digits.
inline std::string config_hash(const json& config) {
    const std::string s = config.dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace xxz
