#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "xxz/bethe_solver.hpp"
#include "xxz/config.hpp"
#include "xxz/golden.hpp"
#include "xxz/hamiltonians.hpp"
#include "xxz/operators.hpp"
#include "xxz/qfunction.hpp"
#include "xxz/record.hpp"
#include "xxz/spectrum.hpp"

#ifndef XXZ_VERSION
#define XXZ_VERSION "0.1.0"
#endif

namespace xxz::cli {

enum ExitCode : int { ok = 0, invalid_config = 1, numerical_failure = 2 };

/// One parsed command line.
struct Invocation {
    std::vector<std::string> command;  // e.g. {"verify", "conds"}
    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<double> tol;
    std::optional<int> max_iter;
    RecordFormat format = RecordFormat::Json;
    int jobs = 1;
};

/// Thresholds the verify suites report against.
struct Thresholds {
    static constexpr double funcrel = 1e-9;
    static constexpr double cond0 = 1e-12;
    static constexpr double cond1 = 1e-9;
    static constexpr double cond2 = 1e-8;
    static constexpr double quadratic = 1e-8;
    static constexpr double commute = 1e-10;
    static constexpr double derivative = 1e-8;
    static constexpr double detm_diagonalization = 1e-7;
    static constexpr double detm_tq = 1e-8;
    static constexpr double eigen_residual = 1e-8;
    static constexpr double diagonalization_match = 1e-6;
};

namespace detail {

struct Settings {
    NewtonOptions newton;
};

inline json settings_json(const Settings& s) {
    return json{{"tol", s.newton.tol}, {"max_iter", s.newton.max_iter}};
}

/// Deterministic, platform-independent sample points in the box
/// [-0.8, 0.8] x [-0.8, 0.8] (additive recurrence on the plastic number).
inline std::vector<cplx> default_points(int count, int salt = 0) {
    constexpr double a1 = 0.7548776662466927;
    constexpr double a2 = 0.5698402909980532;
    std::vector<cplx> out;
    for (int k = 1; k <= count; ++k) {
        const double x = std::fmod(0.5 + (k + 97 * salt) * a1, 1.0);
        const double y = std::fmod(0.5 + (k + 97 * salt) * a2, 1.0);
        out.push_back(cplx(1.6 * x - 0.8, 1.6 * y - 0.8));
    }
    return out;
}

inline bool complex_less(cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

inline DenseMatrix hamiltonian_for(const ModelParams& p) {
    if (p.two_s == 1) return hamiltonian_half(p);
    if (p.two_s == 2) return hamiltonian_one(p);
    throw Error(ErrorKind::UnsupportedCase, "Hamiltonians exist for s = 1/2 and s = 1 only");
}

inline RunRecord new_record(const std::string& command, const RunConfig& cfg, const Settings& s) {
    RunRecord rec;
    rec.command = command;
    rec.config_echo = json{{"command", command}, {"config", cfg.echo()}, {"settings", settings_json(s)}};
    return rec;
}

inline void fail_if(RunRecord& rec, bool bad, const std::string& why) {
    if (!bad) return;
    rec.status = "failed";
    rec.notes.push_back(why);
}

// ---------------------------------------------------------------------------
// Commands. Each returns a record; validation problems are thrown.
// ---------------------------------------------------------------------------

inline RunRecord cmd_spectrum(const RunConfig& cfg, const Settings& s) {
    RunRecord rec = new_record("spectrum", cfg, s);
    const SpectrumReport rep = full_spectrum(hamiltonian_for(cfg.params));
    std::vector<std::size_t> order(rep.eigenvalues.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return complex_less(rep.eigenvalues[a], rep.eigenvalues[b]); });
    double worst = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        LevelRecord l;
        l.index = static_cast<int>(k);
        l.energy = rep.eigenvalues[order[k]];
        l.max_residual = rep.residual_norms[order[k]];
        l.method = "diagonalization";
        worst = std::max(worst, l.max_residual);
        rec.levels.push_back(std::move(l));
    }
    rec.residuals["max_eigen_residual"] = worst;
    fail_if(rec, worst >= Thresholds::eigen_residual, "eigenpair residual above 1e-8");
    return rec;
}

inline LevelRecord level_from(const BetheState& st, const EnergyBreakdown& e, double residual, int index) {
    LevelRecord l;
    l.index = index;
    l.energy = e.total;
    l.roots = canonical_roots(st.roots(), st.shift());
    l.max_residual = residual;
    l.method = std::string(to_string(e.method));
    return l;
}

inline void sort_levels(std::vector<LevelRecord>& levels) {
    std::stable_sort(levels.begin(), levels.end(),
                     [](const LevelRecord& a, const LevelRecord& b) { return complex_less(a.energy, b.energy); });
    for (std::size_t i = 0; i < levels.size(); ++i) levels[i].index = static_cast<int>(i);
}

inline RunRecord cmd_bethe_solve(const RunConfig& cfg, const Settings& s) {
    RunRecord rec = new_record("bethe solve", cfg, s);
    const ModelParams& p = cfg.params;
    std::vector<std::optional<BetheLevel>> found;
    if (!cfg.seeds.empty()) {
        found = bethe_levels_from_seeds(p, cfg.seeds, cfg.start.value_or(p), s.newton, &rec.notes);
    } else if (p.two_s == 1) {
        found = bethe_levels_from_transfer(p, s.newton, &rec.notes);
    } else {
        auto [seeds, sp] = default_seeds(p);
        found = bethe_levels_from_seeds(p, seeds, sp, s.newton, &rec.notes);
    }
    double worst = 0.0;
    std::size_t missing = 0;
    for (const auto& f : found) {
        if (!f) {
            ++missing;
            continue;
        }
        rec.levels.push_back(level_from(f->state, f->energy, f->max_residual, 0));
        worst = std::max(worst, f->max_residual);
    }
    sort_levels(rec.levels);
    rec.residuals["max_bethe_residual"] = worst;
    if (missing) {
        rec.status = "partial";
        rec.notes.push_back(std::to_string(missing) + " level(s) could not be solved");
    }
    return rec;
}

inline RunRecord cmd_bethe_refine(const RunConfig& cfg, const Settings& s) {
    RunRecord rec = new_record("bethe refine", cfg, s);
    if (cfg.seeds.empty()) throw Error(ErrorKind::InvalidParams, "bethe refine needs [[seed]] entries");
    if (cfg.start) throw Error(ErrorKind::InvalidParams, "bethe refine does not continue; use bethe solve with [start]");
    double worst = 0.0;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        const NewtonResult nr = newton_solve(BetheState(cfg.params, cfg.seeds[i]), s.newton);
        const double res = max_abs(nr.residuals);
        rec.residuals["seed[" + std::to_string(i) + "].iterations"] = nr.iterations;
        worst = std::max(worst, res);
        if (!nr.converged) {
            rec.status = "partial";
            rec.notes.push_back("seed " + std::to_string(i) + ": no convergence, residual " + std::to_string(res));
            LevelRecord l;
            l.index = static_cast<int>(i);
            l.roots = canonical_roots(nr.state.roots(), nr.state.shift());
            l.max_residual = res;
            l.method = "unconverged";
            rec.levels.push_back(std::move(l));
            continue;
        }
        const EnergyBreakdown e = energy_from_roots(nr.state);
        rec.levels.push_back(level_from(nr.state, e, res, static_cast<int>(i)));
    }
    rec.residuals["max_bethe_residual"] = worst;
    return rec;
}

inline RunRecord cmd_verify(const std::string& which, const RunConfig& cfg, const Settings& s) {
    RunRecord rec = new_record("verify " + which, cfg, s);
    const ModelParams& p = cfg.params;
    require_supported(p);
    auto points = [&](int count, int salt) { return cfg.u_points.empty() ? default_points(count, salt) : cfg.u_points; };

    if (which == "funcrel") {
        const auto us = points(10, 1);
        double worst = 0.0;
        for (cplx u : us) worst = std::max(worst, functional_relation_operator_residual(u, p));
        rec.residuals["funcrel_max"] = worst;
        fail_if(rec, !(worst < Thresholds::funcrel), "operator functional relation above 1e-9");
    } else if (which == "conds") {
        const auto us = points(50, 2);
        double c0 = 0.0, c1 = 0.0, c2 = 0.0, quad = 0.0;
        for (cplx u : us) {
            c0 = std::max(c0, cond0_residual(u, p));
            c1 = std::max(c1, std::abs(cond1_residual(u, p)));
            c2 = std::max(c2, std::abs(cond2_residual(u, p)));
            quad = std::max(quad, std::abs(quadratic_residual(u, p)));
        }
        rec.residuals["cond0_max"] = c0;
        rec.residuals["cond1_max"] = c1;
        rec.residuals["cond2_max"] = c2;
        rec.residuals["quadratic_max"] = quad;
        fail_if(rec, !(c0 < Thresholds::cond0), "periodicity condition above 1e-12");
        fail_if(rec, !(c1 < Thresholds::cond1), "h-delta condition above 1e-9");
        fail_if(rec, !(c2 < Thresholds::cond2), "z + crossed z = f condition above 1e-8");
        fail_if(rec, !(quad < Thresholds::quadratic), "z-quadratic above 1e-8");
    } else if (which == "commute") {
        if (p.two_s != 1) throw Error(ErrorKind::UnsupportedCase, "commutativity is checked on the s = 1/2 transfer matrix");
        const auto a = points(20, 3);
        const auto b = points(20, 4);
        double worst = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k)
            worst = std::max(worst, commutator_residual(a[k], b[k % b.size()], p));
        rec.residuals["commutator_max"] = worst;
        fail_if(rec, !(worst < Thresholds::commute), "commutator above 1e-10");
    } else if (which == "derivative") {
        const double r = derivative_identity_residual(p, SpinTag::Half);
        rec.residuals["derivative_identity"] = r;
        fail_if(rec, !(r < Thresholds::derivative), "derivative identity above 1e-8");
    } else if (which == "detm") {
        const auto us = points(5, 5);
        double worst = 0.0;
        if (p.two_s == 1) {
            // Lambda from the transfer matrix itself, one branch at a time
            const TransferBranches br(p);
            const DetMConfig dc(p, LambdaSource::FromDiagonalization);
            for (Eigen::Index i = 0; i < br.size(); ++i)
                for (cplx u : us) {
                    auto lam = [&](cplx v) { return br.values(v).first(i); };
                    worst = std::max(worst, std::abs(det_m_residual(u, dc, lam)));
                }
            rec.residuals["detm_diagonalization_max"] = worst;
            fail_if(rec, !(worst < Thresholds::detm_diagonalization), "det M above 1e-7");
        } else {
            std::vector<std::vector<cplx>> seeds = cfg.seeds;
            ModelParams sp = cfg.start.value_or(p);
            if (seeds.empty()) std::tie(seeds, sp) = default_seeds(p);
            const auto found = bethe_levels_from_seeds(p, seeds, sp, s.newton, &rec.notes);
            const DetMConfig dc(p, LambdaSource::FromTQ);
            for (const auto& f : found) {
                if (!f) {
                    rec.status = "partial";
                    continue;
                }
                for (cplx u : us) {
                    auto lam = [&](cplx v) { return lambda_tq_unrescaled(v, f->state); };
                    worst = std::max(worst, std::abs(det_m_residual(u, dc, lam)));
                }
            }
            rec.residuals["detm_tq_max"] = worst;
            fail_if(rec, !(worst < Thresholds::detm_tq), "det M above 1e-8");
        }
    } else {
        throw Error(ErrorKind::InvalidParams, "unknown verify suite '" + which + "'");
    }
    return rec;
}

inline RunRecord cmd_match(const RunConfig& cfg, const Settings& s) {
    CompletenessOptions opt;
    opt.newton = s.newton;
    opt.seeds = cfg.seeds;
    opt.seed_params = cfg.start;
    RunRecord rec;
    try {
        rec = completeness_report(cfg.params, opt);
    } catch (const IncompleteMatchError& e) {
        rec = e.record();
    }
    const RunRecord base = new_record("match", cfg, s);
    rec.command = base.command;
    rec.config_echo = base.config_echo;
    return rec;
}

inline RunRecord cmd_reproduce(const std::string& which, const Settings& s) {
    ModelParams p;
    const std::vector<golden::GoldenLevel>* printed = nullptr;
    double tol = 0.0;
    if (which == "table1") {
        p = golden::table1_params();
        printed = &golden::table1_levels();
        tol = golden::table1_tolerance;
    } else if (which == "table2") {
        p = golden::table2_params();
        printed = &golden::table2_levels();
        tol = golden::table2_tolerance;
    } else {
        throw Error(ErrorKind::InvalidParams, "unknown table '" + which + "' (expected table1 or table2)");
    }
    RunConfig cfg;
    cfg.params = p;
    RunRecord rec = cmd_match(cfg, s);
    rec.command = "reproduce " + which;
    rec.config_echo["command"] = rec.command;

    // pair the Bethe energies with the printed column
    std::vector<cplx> ours, theirs;
    for (const auto& l : rec.levels) ours.push_back(l.energy);
    for (const auto& g : *printed) theirs.push_back(g.energy);
    const SpectrumReport m = match_spectra(ours, theirs);
    double diag_dev = rec.max_deviation;
    for (std::size_t i = 0; i < rec.levels.size(); ++i) {
        LevelRecord& l = rec.levels[i];
        l.reference = theirs[static_cast<std::size_t>(m.pairing[i])];
        l.deviation = std::abs(l.energy - *l.reference);
    }
    rec.pairing = m.pairing;
    rec.max_deviation = m.max_pair_deviation;
    rec.residuals["max_deviation_vs_diagonalization"] = diag_dev;
    rec.residuals["max_deviation_vs_printed"] = m.max_pair_deviation;
    if (rec.status == "ok") {
        fail_if(rec, !(m.max_pair_deviation < tol), "printed values not reproduced within tolerance");
        fail_if(rec, !(diag_dev < Thresholds::diagonalization_match), "diagonalization not matched within 1e-6");
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline std::filesystem::path results_root(const Invocation& inv) {
    if (inv.out_dir) return *inv.out_dir;
    if (const char* env = std::getenv("XXZ_RESULTS_DIR"); env && *env) return env;
    return "results";
}

/// Writes via a temporary in the same directory and renames, so readers
/// never see a half-written file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ostringstream tmpname;
    tmpname << path.filename().string() << ".tmp." << std::this_thread::get_id();
    const std::filesystem::path tmp = path.parent_path() / tmpname.str();
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::filesystem::path persist(const RunRecord& rec, const std::filesystem::path& root) {
    const std::filesystem::path dir = root / "runs" / config_hash(rec.config_echo);
    write_atomic(dir / "record.json", serialize(rec, RecordFormat::Json));
    write_atomic(dir / "record.csv", serialize(rec, RecordFormat::Csv));
    return dir;
}

inline json error_object(ErrorKind kind, const std::string& message, int exit_code) {
    return json{{"error", {{"kind", std::string(to_string(kind))}, {"message", message}, {"exit_code", exit_code}}}};
}

inline RunRecord execute_task(const std::string& task, const RunConfig& cfg, const Settings& s) {
    if (task == "spectrum") return cmd_spectrum(cfg, s);
    if (task == "bethe" || task == "solve") return cmd_bethe_solve(cfg, s);
    if (task == "match") return cmd_match(cfg, s);
    for (const char* v : {"funcrel", "conds", "commute", "derivative", "detm"})
        if (task == v) return cmd_verify(task, cfg, s);
    throw Error(ErrorKind::InvalidParams, "unknown sweep task '" + task + "'");
}

inline RunRecord cmd_sweep(const RunConfig& cfg, const Settings& s, const std::filesystem::path& root, int jobs) {
    if (cfg.points.empty()) throw Error(ErrorKind::InvalidParams, "sweep needs [[point]] entries");
    // fail fast on a bad task name before spawning workers
    static const std::vector<std::string> tasks{"spectrum", "bethe", "solve",   "match",
                                                "funcrel",  "conds", "commute", "derivative", "detm"};
    if (std::find(tasks.begin(), tasks.end(), cfg.task) == tasks.end())
        throw Error(ErrorKind::InvalidParams, "unknown sweep task '" + cfg.task + "'");

    struct Outcome {
        std::string hash;
        std::string status;
        double max_deviation = 0.0;
        std::string error;
    };
    std::vector<Outcome> outcomes(cfg.points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cfg.points.size(); i = next++) {
            RunConfig one;
            one.params = cfg.points[i];
            one.seeds = cfg.seeds;
            one.start = cfg.start;
            one.u_points = cfg.u_points;
            RunRecord rec;
            try {
                rec = execute_task(cfg.task, one, s);
            } catch (const Error& e) {
                rec = new_record(cfg.task, one, s);
                rec.status = "failed";
                rec.notes.push_back(e.what());
                outcomes[i].error = e.what();
            }
            rec.meta.version = XXZ_VERSION;
            rec.meta.timestamp = utc_timestamp();
            persist(rec, root);
            outcomes[i].hash = config_hash(rec.config_echo);
            outcomes[i].status = rec.status;
            outcomes[i].max_deviation = rec.max_deviation;
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(cfg.points.size())));
    std::vector<std::thread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // merged in point order, independent of scheduling
    RunRecord rec = new_record("sweep", cfg, s);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const Outcome& o = outcomes[i];
        const std::string key = "point[" + std::to_string(i) + "]";
        rec.residuals[key + ".max_deviation"] = o.max_deviation;
        rec.notes.push_back(key + " " + o.hash + " " + o.status + (o.error.empty() ? "" : ": " + o.error));
        rec.max_deviation = std::max(rec.max_deviation, o.max_deviation);
        if (o.status != "ok") rec.status = "partial";
    }
    return rec;
}

inline std::string joined(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : " ") + s;
    return out;
}

}  // namespace detail

/// Runs one command, writes its record under runs/<hash>/ and prints it in
/// the requested format. Returns the process exit code.
inline int run(const Invocation& inv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    using namespace detail;
    const auto t0 = std::chrono::steady_clock::now();
    const std::string name = joined(inv.command);
    Settings s;
    if (inv.tol) s.newton.tol = *inv.tol;
    if (inv.max_iter) s.newton.max_iter = *inv.max_iter;

    RunRecord rec;
    try {
        if (inv.command.empty()) throw Error(ErrorKind::InvalidParams, "no command given");
        if (s.newton.tol <= 0.0) throw Error(ErrorKind::InvalidParams, "--tol must be positive");
        if (s.newton.max_iter < 1) throw Error(ErrorKind::InvalidParams, "--max-iter must be at least 1");
        if (inv.jobs < 1) throw Error(ErrorKind::InvalidParams, "--jobs must be at least 1");
        const std::string& head = inv.command[0];
        const std::string sub = inv.command.size() > 1 ? inv.command[1] : "";
        auto config = [&]() {
            if (!inv.config_path) throw Error(ErrorKind::InvalidParams, "'" + name + "' needs --config");
            return load_config(*inv.config_path);
        };
        if (head == "spectrum") {
            rec = cmd_spectrum(config(), s);
        } else if (head == "bethe" && sub == "solve") {
            rec = cmd_bethe_solve(config(), s);
        } else if (head == "bethe" && sub == "refine") {
            rec = cmd_bethe_refine(config(), s);
        } else if (head == "verify") {
            rec = cmd_verify(sub, config(), s);
        } else if (head == "match") {
            rec = cmd_match(config(), s);
        } else if (head == "reproduce") {
            rec = cmd_reproduce(sub, s);
        } else if (head == "sweep") {
            rec = cmd_sweep(config(), s, results_root(inv), inv.jobs);
        } else {
            throw Error(ErrorKind::InvalidParams, "unknown command '" + name + "'");
        }
    } catch (const Error& e) {
        if (e.is_validation()) {
            err << error_object(e.kind(), e.message(), invalid_config).dump() << "\n";
            return invalid_config;
        }
        // numerical failure before a record existed: keep what we know
        rec = RunRecord{};
        rec.command = name;
        rec.status = "failed";
        rec.config_echo = json{{"command", name}, {"settings", settings_json(s)}};
        if (inv.config_path) rec.config_echo["config_path"] = *inv.config_path;
        rec.notes.push_back(e.what());
    } catch (const std::exception& e) {
        err << error_object(ErrorKind::ConvergenceFailure, e.what(), numerical_failure).dump() << "\n";
        return numerical_failure;
    }

    rec.meta.version = XXZ_VERSION;
    rec.meta.timestamp = utc_timestamp();
    rec.meta.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::filesystem::path dir;
    try {
        dir = persist(rec, results_root(inv));
    } catch (const std::exception& e) {
        err << error_object(ErrorKind::InvalidParams, std::string("cannot write results: ") + e.what(), invalid_config)
                   .dump()
            << "\n";
        return invalid_config;
    }
    out << serialize(rec, inv.format);
    if (rec.status == "ok") return ok;
    const std::string why = rec.notes.empty() ? rec.status : rec.notes.back();
    json eo = error_object(rec.status == "failed" && rec.levels.empty() ? ErrorKind::ConvergenceFailure
                                                                        : ErrorKind::IncompleteMatch,
                           why, numerical_failure);
    eo["error"]["record"] = (dir / "record.json").string();
    err << eo.dump() << "\n";
    return numerical_failure;
}

}  // namespace xxz::cli
