#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <toml.hpp>

#include "xxz/core.hpp"
#include "xxz/record.hpp"

namespace xxz {

/// Everything a run reads from its TOML file.
///
///   n = 4            two_s = 1        r = 7        q = 5
///   case = "alpha_alpha"              # or alpha_beta, beta_beta
///   free_alpha_side = "plus"          # alpha_beta only, likewise free_beta_side
///   alpha_minus = [0.0, 0.45]         # complex as [re, im]; a bare number is real
///   theta = [0.54, 0.0]
///
/// Parameters fixed by the case must be left out; eta is never accepted since
/// it is rebuilt from r and q. Optional extras: [[seed]] tables with `roots`,
/// a [start] table giving the free parameters the seeds solve, `u_points`
/// for the verify suites, and for sweeps `task` plus [[point]] overrides.
struct RunConfig {
    ModelParams params;
    std::vector<std::vector<cplx>> seeds;
    std::optional<ModelParams> start;
    std::vector<cplx> u_points;
    std::string task = "match";
    std::vector<ModelParams> points;

    json echo() const {
        json seeds_j = json::array();
        for (const auto& s : seeds) seeds_j.push_back(complex_list_to_json(s));
        json points_j = json::array();
        for (const auto& p : points) points_j.push_back(params_to_json(p));
        json j{{"params", params_to_json(params)},
               {"seeds", seeds_j},
               {"u_points", complex_list_to_json(u_points)},
               {"task", task},
               {"points", points_j}};
        j["start"] = start ? params_to_json(*start) : json(nullptr);
        return j;
    }
};

namespace detail {

inline const std::set<std::string>& model_keys() {
    static const std::set<std::string> keys{"n",          "two_s",       "r",           "q",
                                            "case",       "free_alpha_side", "free_beta_side",
                                            "alpha_minus", "alpha_plus", "beta_minus",  "beta_plus",
                                            "theta",      "theta_minus", "theta_plus"};
    return keys;
}

[[noreturn]] inline void config_error(const std::string& msg) { throw Error(ErrorKind::InvalidParams, msg); }

inline cplx complex_node(const toml::node& node, const std::string& key) {
    if (auto v = node.value<double>()) return {*v, 0.0};
    const toml::array* arr = node.as_array();
    if (!arr || arr->size() != 2) config_error("'" + key + "' must be a number or [re, im]");
    auto re = (*arr)[0].value<double>();
    auto im = (*arr)[1].value<double>();
    if (!re || !im) config_error("'" + key + "' must hold two numbers");
    return {*re, *im};
}

inline std::vector<cplx> complex_list_node(const toml::node& node, const std::string& key) {
    const toml::array* arr = node.as_array();
    if (!arr) config_error("'" + key + "' must be an array of [re, im] pairs");
    std::vector<cplx> out;
    for (const auto& e : *arr) out.push_back(complex_node(e, key));
    return out;
}

inline int int_key(const toml::table& t, const std::string& key) {
    auto v = t[key].value<long long>();
    if (!v) config_error("missing integer '" + key + "'");
    return static_cast<int>(*v);
}

inline std::string string_key(const toml::table& t, const std::string& key) {
    auto v = t[key].value<std::string>();
    if (!v) config_error("missing string '" + key + "'");
    return *v;
}

inline ModelParams model_from_nodes(const toml::table& t) {
    if (t.contains("eta")) config_error("'eta' is derived from r and q and must not be given");
    const int n = int_key(t, "n");
    const int two_s = int_key(t, "two_s");
    const int r = int_key(t, "r");
    const int q = int_key(t, "q");
    const BoundaryCase bc = boundary_case_from_string(string_key(t, "case"));
    const ChainSpec chain{n, two_s, r, q};

    auto get = [&](const std::string& key) -> std::optional<cplx> {
        if (const toml::node* node = t.get(key)) return complex_node(*node, key);
        return std::nullopt;
    };
    auto need = [&](const std::string& key) {
        auto v = get(key);
        if (!v) config_error("missing boundary parameter '" + key + "'");
        return *v;
    };
    auto forbid = [&](const std::string& key, const char* why) {
        if (t.contains(key)) config_error("'" + key + "' is fixed " + std::string(why) + " and must not be given");
    };

    cplx theta;
    if (auto th = get("theta")) {
        if (t.contains("theta_minus") || t.contains("theta_plus"))
            config_error("give either 'theta' or 'theta_minus'/'theta_plus', not both");
        theta = *th;
    } else {
        const cplx tm = need("theta_minus");
        const cplx tp = need("theta_plus");
        if (tm != tp) config_error("theta_minus must equal theta_plus");
        theta = tm;
    }

    ModelParams p;
    switch (bc) {
        case BoundaryCase::Case1AlphaBeta: {
            const Side fa = side_from_string(string_key(t, "free_alpha_side"));
            const Side fb = side_from_string(string_key(t, "free_beta_side"));
            const std::string a_free = fa == Side::Minus ? "alpha_minus" : "alpha_plus";
            const std::string a_fixed = fa == Side::Minus ? "alpha_plus" : "alpha_minus";
            const std::string b_free = fb == Side::Minus ? "beta_minus" : "beta_plus";
            const std::string b_fixed = fb == Side::Minus ? "beta_plus" : "beta_minus";
            forbid(a_fixed, "to i*pi/2 in case alpha_beta");
            forbid(b_fixed, "to eta in case alpha_beta");
            p = case1_params(chain, fa, need(a_free), fb, need(b_free), theta);
            break;
        }
        case BoundaryCase::Case2AlphaAlpha:
            forbid("beta_minus", "to eta in case alpha_alpha");
            forbid("beta_plus", "to eta in case alpha_alpha");
            p = case2_params(chain, need("alpha_minus"), need("alpha_plus"), theta);
            break;
        case BoundaryCase::Case3BetaBeta:
            forbid("alpha_minus", "to eta in case beta_beta");
            forbid("alpha_plus", "to eta in case beta_beta");
            p = case3_params(chain, need("beta_minus"), need("beta_plus"), theta);
            break;
    }
    if (bc != BoundaryCase::Case1AlphaBeta && (t.contains("free_alpha_side") || t.contains("free_beta_side")))
        config_error("free sides only apply to case alpha_beta");
    return p;
}

/// Copy of `base` with the entries of `over` replacing same-named keys.
inline toml::table overlay(const toml::table& base, const toml::table& over) {
    toml::table out;
    for (const auto& [k, v] : base)
        if (model_keys().count(std::string(k.str()))) out.insert_or_assign(k, v);
    // theta and theta_minus/theta_plus are alternatives; an override of one
    // form replaces the other
    if (over.contains("theta")) {
        out.erase("theta_minus");
        out.erase("theta_plus");
    }
    if (over.contains("theta_minus") || over.contains("theta_plus")) out.erase("theta");
    for (const auto& [k, v] : over) out.insert_or_assign(k, v);
    return out;
}

}  // namespace detail

inline RunConfig parse_config(const toml::table& t) {
    static const std::set<std::string> extra{"seed", "start", "u_points", "task", "point"};
    for (const auto& [k, v] : t) {
        const std::string key(k.str());
        if (!detail::model_keys().count(key) && !extra.count(key) && key != "eta")
            detail::config_error("unknown key '" + key + "'");
    }

    RunConfig cfg;
    cfg.params = detail::model_from_nodes(t);

    if (const toml::array* seeds = t["seed"].as_array()) {
        for (const auto& s : *seeds) {
            const toml::table* st = s.as_table();
            if (!st || !st->contains("roots")) detail::config_error("each [[seed]] needs 'roots'");
            cfg.seeds.push_back(detail::complex_list_node(*st->get("roots"), "roots"));
        }
    } else if (t.contains("seed")) {
        detail::config_error("seeds are given as [[seed]] tables");
    }

    if (const toml::table* st = t["start"].as_table()) {
        for (const auto& [k, v] : *st) {
            const std::string key(k.str());
            if (key == "n" || key == "two_s" || key == "r" || key == "q" || key == "case" ||
                key == "free_alpha_side" || key == "free_beta_side")
                detail::config_error("[start] may only change boundary parameters, not '" + key + "'");
        }
        cfg.start = detail::model_from_nodes(detail::overlay(t, *st));
    }
    if (cfg.start && cfg.seeds.empty()) detail::config_error("[start] needs [[seed]] entries");

    if (const toml::node* up = t.get("u_points")) cfg.u_points = detail::complex_list_node(*up, "u_points");
    if (auto task = t["task"].value<std::string>()) cfg.task = *task;

    if (const toml::array* pts = t["point"].as_array()) {
        for (const auto& pt : *pts) {
            const toml::table* ptab = pt.as_table();
            if (!ptab) detail::config_error("each [[point]] must be a table");
            for (const auto& [k, v] : *ptab)
                if (!detail::model_keys().count(std::string(k.str())))
                    detail::config_error("[[point]] key '" + std::string(k.str()) + "' is not a model key");
            cfg.points.push_back(detail::model_from_nodes(detail::overlay(t, *ptab)));
        }
    }
    return cfg;
}

inline RunConfig parse_config_string(std::string_view text, std::string_view source = "<string>") {
    try {
        return parse_config(toml::parse(text, source));
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error: " << e.description() << " at " << e.source().begin;
        throw Error(ErrorKind::InvalidParams, os.str());
    }
}

inline RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::InvalidParams, "config not found: " + path.string());
    try {
        return parse_config(toml::parse_file(path.string()));
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error in " << path.string() << ": " << e.description() << " at " << e.source().begin;
        throw Error(ErrorKind::InvalidParams, os.str());
    }
}

}  // namespace xxz
