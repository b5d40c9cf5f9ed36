#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "balltrace/config.hpp"

namespace balltrace {

// One verification cell. lhs_raw is the plain shell sum (or the two-point
// slope / finite-section value where no shell series exists), lhs_extrapolated
// the adopted value, lhs_err its estimated error. abs_diff compares the
// adopted value against rhs; for inequality experiments it is the violation
// max(0, rhs - lhs). pass requires abs_diff <= tolerance and a converged lhs.
struct ReportRow {
    double t = 0.0;
    int N = 0;
    double lhs_raw = 0.0;
    double lhs_extrapolated = 0.0;
    double lhs_err = 0.0;
    double rhs = 0.0;
    double abs_diff = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::string experiment;
    int n = 0;
    double tolerance = 0.0;
    unsigned long seed = 0;
    std::vector<ReportRow> rows;  // ordered by (t, N)
    double wall_seconds = 0.0;
    bool all_pass() const;
};

// Estimated padded basis size binomial(N + pad + n, n) the experiment will ask
// for at core degree N; run() refuses grids whose estimate exceeds
// kBasisBudget unless override_budget is set.
std::size_t padded_dim_estimate(const ExperimentConfig& cfg, int N);

// Runs every (t, N) cell of the grid, up to cfg.workers at a time. A cell
// whose quadrature fails to converge yields a failing row with NaN in the
// affected columns; budget violations throw BudgetError.
//
// Cell semantics per experiment:
//   helton-howe          Tr[T_f1,...,T_f2n] vs the top-form integral
//   semicommutator-disk  Tr(T_fT_g - T_fg) vs boundary term + rho_t integral
//   partial-antisym      odd/even antisymmetrized trace vs the mixed wedge
//   connes-chern         t^(p-n) * character pairing vs its closed t->oo limit
//   quantization-decay   one row per N: log-log slope of |R_{f,g,k+1}| over
//                        the t grid vs -(k+1)
//   hankel-schatten      p=n=1: |H_g|_{S2}^2 vs the disk trace formula;
//                        p>n: t^(p-n) |H_g|_{S2p}^{2p} vs its t->oo limit
//   uncertainty-s4       |H_conj(f1)|_{S4}^2 |H_conj(f2)|_{S4}^2 >= wedge
//                        integral (abs_diff = violation)
VerificationReport run(const ExperimentConfig& cfg);

// columns: experiment,t,N,lhs_raw,lhs_extrapolated,lhs_err,rhs,abs_diff,pass
// with 17 significant digits; byte-identical across reruns of one config.
void write_csv(const VerificationReport& rep, std::ostream& os);
// rows plus metadata; parses back with any JSON reader
void write_json(const VerificationReport& rep, std::ostream& os);
// (x, y) = (t, value) series per curve, one lhs and one rhs curve per N
void write_plot_data(const VerificationReport& rep, std::ostream& os);

} // namespace balltrace
