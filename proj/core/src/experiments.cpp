#include "balltrace/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <utility>

#include <Eigen/Eigenvalues>

#include <json.hpp>

#include "balltrace/forms.hpp"
#include "balltrace/operators.hpp"
#include "balltrace/traces.hpp"

namespace balltrace {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Cell {
    double t;
    int N;
};

std::vector<Cell> make_cells(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    cells.reserve(cfg.t_grid.size() * cfg.N_grid.size());
    for (double t : cfg.t_grid)
        for (int N : cfg.N_grid) cells.push_back({t, N});
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        return a.t != b.t ? a.t < b.t : a.N < b.N;
    });
    return cells;
}

// Runs fn over the cells with up to `workers` threads; results land in cell
// order, so the assembled report does not depend on scheduling.
template <class R, class Fn>
std::vector<R> map_cells(const std::vector<Cell>& cells, int workers, Fn fn) {
    std::vector<R> out(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex mtx;
    std::exception_ptr first;
    auto body = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            {
                std::lock_guard<std::mutex> lock(mtx);
                if (first) break;
            }
            try {
                out[i] = fn(cells[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mtx);
                if (!first) first = std::current_exception();
                break;
            }
        }
    };
    const int k = std::min<int>(workers, static_cast<int>(cells.size()));
    if (k <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (first) std::rethrow_exception(first);
    return out;
}

ReportRow series_row(const Cell& c, const ShellSeries& s, Complex rhs, double tol,
                     double scale = 1.0) {
    ReportRow r;
    r.t = c.t;
    r.N = c.N;
    r.lhs_raw = (scale * s.raw).real();
    r.lhs_extrapolated = (scale * s.extrapolated).real();
    r.lhs_err = std::abs(scale) * s.error_estimate;
    r.rhs = rhs.real();
    r.abs_diff = std::abs(scale * s.extrapolated - rhs);
    r.pass = s.converged && r.abs_diff <= tol;
    return r;
}

// sum of max(eigenvalue, 0)^p over a Hermitian PSD block
double psd_schatten_pow(const Eigen::MatrixXcd& block, double p) {
    if (block.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        s += std::pow(std::max(es.eigenvalues()[i], 0.0), p);
    return s;
}

// same over the sub-section of degrees <= d
double psd_schatten_pow_upto(const OperatorMatrix& m, int d, double p) {
    if (d < 0) return 0.0;
    const auto sz = static_cast<Eigen::Index>(m.basis().shell_end(d));
    return psd_schatten_pow(m.matrix().topLeftCorner(sz, sz), p);
}

// per distinct t, NaN on quadrature failure so the affected rows fail honestly
template <class Fn>
std::map<double, Complex> rhs_by_t(const std::vector<Cell>& cells, Fn fn) {
    std::map<double, Complex> out;
    for (const Cell& c : cells) {
        if (out.count(c.t)) continue;
        try {
            out[c.t] = fn(c.t);
        } catch (const QuadratureError&) {
            out[c.t] = Complex(kNaN, kNaN);
        }
    }
    return out;
}

int holo_sum(const std::vector<PolySymbol>& v) {
    int s = 0;
    for (const auto& x : v) s += x.holo_degree();
    return s;
}

std::vector<ReportRow> run_quantization_decay(const ExperimentConfig& cfg,
                                              const std::vector<Cell>& cells,
                                              const PolySymbol& f, const PolySymbol& g) {
    const auto norms = map_cells<double>(cells, cfg.workers, [&](const Cell& c) {
        return operator_norm(quantization_residual(f, g, cfg.k, WeightParam(c.t), c.N));
    });
    std::map<int, std::vector<std::pair<double, double>>> by_N;
    for (std::size_t i = 0; i < cells.size(); ++i)
        by_N[cells[i].N].push_back({cells[i].t, norms[i]});

    std::vector<ReportRow> rows;
    for (const auto& [N, pts] : by_N) {
        ReportRow r;
        r.N = N;
        r.t = pts.back().first;
        r.rhs = -(cfg.k + 1.0);
        bool usable = pts.size() >= 2;
        for (const auto& [t, v] : pts) usable = usable && v > 0.0;
        if (!usable) {
            r.lhs_raw = r.lhs_extrapolated = r.lhs_err = r.abs_diff = kNaN;
            r.pass = false;
            rows.push_back(r);
            continue;
        }
        const std::size_t m = pts.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [t, v] : pts) {
            const double x = std::log(t), y = std::log(v);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double den = m * sxx - sx * sx;
        const double slope = (m * sxy - sx * sy) / den;
        const double icept = (sy - slope * sx) / m;
        double ss_res = 0.0, ss_x = 0.0;
        for (const auto& [t, v] : pts) {
            const double x = std::log(t);
            const double res = std::log(v) - (icept + slope * x);
            ss_res += res * res;
            ss_x += (x - sx / m) * (x - sx / m);
        }
        const auto& [t1, v1] = pts[m - 2];
        const auto& [t2, v2] = pts[m - 1];
        r.lhs_raw = std::log(v2 / v1) / std::log(t2 / t1);
        r.lhs_extrapolated = slope;
        r.lhs_err = m > 2 ? std::sqrt(ss_res / (m - 2.0) / ss_x) : 0.0;
        r.abs_diff = std::abs(slope - r.rhs);
        r.pass = r.abs_diff <= cfg.tolerance;
        rows.push_back(r);
    }
    return rows;
}

} // namespace

bool VerificationReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

std::size_t padded_dim_estimate(const ExperimentConfig& cfg, int N) {
    const auto fs = parse_symbol_list(cfg.f_texts, cfg.n);
    const auto gs = parse_symbol_list(cfg.g_texts, cfg.n);
    int pad = 0;
    if (cfg.experiment == "hankel-schatten") {
        for (const auto& g : gs) pad = std::max(pad, g.holo_degree() + g.anti_degree());
    } else if (cfg.experiment == "uncertainty-s4") {
        for (const auto& f : fs) pad = std::max(pad, f.holo_degree() + f.anti_degree());
    } else {
        pad = holo_sum(fs) + holo_sum(gs);
    }
    return multi_index_count(cfg.n, N + pad);
}

VerificationReport run(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();

    for (int N : cfg.N_grid) {
        const std::size_t est = padded_dim_estimate(cfg, N);
        if (est > kBasisBudget && !cfg.override_budget)
            throw BudgetError("estimated basis size " + std::to_string(est) + " at N = " +
                              std::to_string(N) + " exceeds budget " +
                              std::to_string(kBasisBudget) + " (set override to attempt)");
    }

    VerificationReport rep;
    rep.experiment = cfg.experiment;
    rep.n = cfg.n;
    rep.tolerance = cfg.tolerance;
    rep.seed = cfg.seed;

    const auto fs = parse_symbol_list(cfg.f_texts, cfg.n);
    const auto gs = parse_symbol_list(cfg.g_texts, cfg.n);
    const auto cells = make_cells(cfg);
    const double tol = cfg.tolerance;

    if (cfg.experiment == "helton-howe") {
        const Complex rhs = helton_howe_integral(fs);
        rep.rows = map_cells<ReportRow>(cells, cfg.workers, [&](const Cell& c) {
            return series_row(c, antisym_trace(fs, WeightParam(c.t), c.N), rhs, tol);
        });
    } else if (cfg.experiment == "semicommutator-disk") {
        const auto rhs = rhs_by_t(cells, [&](double t) {
            return disk_semicommutator_rhs(fs[0], gs[0], WeightParam(t)).total();
        });
        rep.rows = map_cells<ReportRow>(cells, cfg.workers, [&](const Cell& c) {
            const auto s = shell_trace(semi_commutator(fs[0], gs[0], WeightParam(c.t), c.N));
            return series_row(c, s, rhs.at(c.t), tol);
        });
    } else if (cfg.experiment == "partial-antisym") {
        const Complex rhs = mixed_wedge_integral(fs, gs);
        const Parity par = cfg.parity == "odd" ? Parity::odd : Parity::even;
        rep.rows = map_cells<ReportRow>(cells, cfg.workers, [&](const Cell& c) {
            return series_row(c, partial_antisym_trace(fs, gs, par, WeightParam(c.t), c.N),
                              rhs, tol);
        });
    } else if (cfg.experiment == "connes-chern") {
        std::vector<PolySymbol> fa, ga;
        for (std::size_t i = 0; i < fs.size(); ++i) (i % 2 ? ga : fa).push_back(fs[i]);
        const double rhs = cc_limit_integral(fa, ga, cfg.p, cfg.n);
        rep.rows = map_cells<ReportRow>(cells, cfg.workers, [&](const Cell& c) {
            const auto [a, b] = connes_chern_series(fs, cfg.p, WeightParam(c.t), c.N);
            const double scale = std::pow(c.t, cfg.p - cfg.n);
            ReportRow r;
            r.t = c.t;
            r.N = c.N;
            r.lhs_raw = (scale * (a.raw - b.raw)).real();
            r.lhs_extrapolated = (scale * (a.extrapolated - b.extrapolated)).real();
            r.lhs_err = std::abs(scale) * (a.error_estimate + b.error_estimate);
            r.rhs = rhs;
            r.abs_diff = std::abs(scale * (a.extrapolated - b.extrapolated) - Complex(rhs));
            r.pass = a.converged && b.converged && r.abs_diff <= tol;
            return r;
        });
    } else if (cfg.experiment == "quantization-decay") {
        rep.rows = run_quantization_decay(cfg, cells, fs[0], gs[0]);
    } else if (cfg.experiment == "hankel-schatten") {
        const PolySymbol& g = gs[0];
        if (cfg.p == cfg.n) {
            const auto rhs = rhs_by_t(cells, [&](double t) {
                return -disk_semicommutator_rhs(sym_conj(g), g, WeightParam(t)).total();
            });
            rep.rows = map_cells<ReportRow>(cells, cfg.workers, [&](const Cell& c) {
                const auto s = shell_trace(hankel_gram(g, WeightParam(c.t), c.N));
                return series_row(c, s, rhs.at(c.t), tol);
            });
        } else {
            const double rhs = hankel_limit_integral(g, cfg.p, cfg.n);
            rep.rows = map_cells<ReportRow>(cells, cfg.workers, [&](const Cell& c) {
                const auto gram = hankel_gram(g, WeightParam(c.t), c.N);
                const double scale = std::pow(c.t, cfg.p - cfg.n);
                const double full = psd_schatten_pow(gram.core_block(), cfg.p);
                const double sub = psd_schatten_pow_upto(gram, c.N - 1, cfg.p);
                ReportRow r;
                r.t = c.t;
                r.N = c.N;
                r.lhs_raw = r.lhs_extrapolated = scale * full;
                r.lhs_err = scale * (full - sub);
                r.rhs = rhs;
                r.abs_diff = std::abs(r.lhs_extrapolated - rhs);
                r.pass = r.abs_diff <= tol;
                return r;
            });
        }
    } else if (cfg.experiment == "uncertainty-s4") {
        const std::vector<PolySymbol> conj_fs = {sym_conj(fs[0]), sym_conj(fs[1])};
        const Complex rhs = mixed_wedge_integral(fs, conj_fs);
        rep.rows = map_cells<ReportRow>(cells, cfg.workers, [&](const Cell& c) {
            const auto gram1 = hankel_gram(conj_fs[0], WeightParam(c.t), c.N);
            const auto gram2 = hankel_gram(conj_fs[1], WeightParam(c.t), c.N);
            const double v1 = std::sqrt(psd_schatten_pow(gram1.core_block(), 2.0));
            const double v2 = std::sqrt(psd_schatten_pow(gram2.core_block(), 2.0));
            const double v1s = std::sqrt(psd_schatten_pow_upto(gram1, c.N - 1, 2.0));
            const double v2s = std::sqrt(psd_schatten_pow_upto(gram2, c.N - 1, 2.0));
            ReportRow r;
            r.t = c.t;
            r.N = c.N;
            r.lhs_raw = r.lhs_extrapolated = v1 * v2;
            r.lhs_err = v1 * v2 - v1s * v2s;
            r.rhs = rhs.real();
            r.abs_diff = std::max(0.0, r.rhs - r.lhs_extrapolated);
            r.pass = r.abs_diff <= tol;
            return r;
        });
    }

    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_csv(const VerificationReport& rep, std::ostream& os) {
    os << "experiment,t,N,lhs_raw,lhs_extrapolated,lhs_err,rhs,abs_diff,pass\n";
    for (const ReportRow& r : rep.rows) {
        os << rep.experiment << ',' << g17(r.t) << ',' << r.N << ',' << g17(r.lhs_raw) << ','
           << g17(r.lhs_extrapolated) << ',' << g17(r.lhs_err) << ',' << g17(r.rhs) << ','
           << g17(r.abs_diff) << ',' << (r.pass ? 1 : 0) << '\n';
    }
}

void write_json(const VerificationReport& rep, std::ostream& os) {
    nlohmann::ordered_json j;
    j["experiment"] = rep.experiment;
    j["n"] = rep.n;
    j["tolerance"] = rep.tolerance;
    j["seed"] = rep.seed;
    j["wall_seconds"] = rep.wall_seconds;
    j["all_pass"] = rep.all_pass();
    auto rows = nlohmann::ordered_json::array();
    for (const ReportRow& r : rep.rows) {
        nlohmann::ordered_json row;
        row["t"] = r.t;
        row["N"] = r.N;
        row["lhs_raw"] = r.lhs_raw;
        row["lhs_extrapolated"] = r.lhs_extrapolated;
        row["lhs_err"] = r.lhs_err;
        row["rhs"] = r.rhs;
        row["abs_diff"] = r.abs_diff;
        row["pass"] = r.pass;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    os << j.dump(2) << '\n';
}

void write_plot_data(const VerificationReport& rep, std::ostream& os) {
    os << "series,x,y\n";
    for (const ReportRow& r : rep.rows)
        os << "lhs[N=" << r.N << "]," << g17(r.t) << ',' << g17(r.lhs_extrapolated) << '\n';
    for (const ReportRow& r : rep.rows)
        os << "rhs[N=" << r.N << "]," << g17(r.t) << ',' << g17(r.rhs) << '\n';
}

} // namespace balltrace
