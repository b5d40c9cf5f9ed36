#pragma once

#include <string>
#include <vector>

#include "balltrace/common.hpp"
#include "balltrace/symbols.hpp"

namespace balltrace {

// The experiments the runner knows how to drive.
const std::vector<std::string>& experiment_ids();

// Flat key = value description of one experiment. '#' starts a comment.
// Symbol lists use the symbols grammar with ';' between entries; numeric
// grids are comma-separated.
//
// keys: experiment, n, f, g, t, N, tolerance, p, k, parity, out_dir, seed,
//       workers
struct ExperimentConfig {
    std::string experiment;
    int n = 0;
    std::vector<std::string> f_texts;
    std::vector<std::string> g_texts;
    std::vector<double> t_grid;
    std::vector<int> N_grid;
    double tolerance = 1e-6;
    int p = 0;                   // Schatten / character exponent
    int k = 0;                   // expansion order of the residual
    std::string parity = "odd";  // partial antisymmetrization flavor
    std::string out_dir = ".";
    unsigned long seed = 0;
    int workers = 1;
    bool override_budget = false;
};

// Parses the key = value text. Errors carry "<source>:<line>: ".
ExperimentConfig parse_config(const std::string& text,
                              const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

// Grid/arity/symbol invariants, including the per-experiment argument shape;
// throws ConfigError.
void validate(const ExperimentConfig& cfg);

// Parses each entry in the declared dimension; wraps failures in ConfigError.
std::vector<PolySymbol> parse_symbol_list(const std::vector<std::string>& texts, int n);

} // namespace balltrace
