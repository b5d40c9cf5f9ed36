#include "balltrace/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace balltrace {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t pos = s.find(sep, start);
        const std::string piece =
            trim(pos == std::string::npos ? s.substr(start) : s.substr(start, pos - start));
        if (!piece.empty()) out.push_back(piece);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

struct LineError {
    std::string msg;
};

double to_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty()) throw LineError{"bad number '" + s + "'"};
    return v;
}

long to_long(const std::string& s) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw LineError{"bad integer '" + s + "'"};
    return v;
}

} // namespace

const std::vector<std::string>& experiment_ids() {
    static const std::vector<std::string> ids = {
        "helton-howe",        "semicommutator-disk", "partial-antisym", "connes-chern",
        "quantization-decay", "hankel-schatten",     "uncertainty-s4"};
    return ids;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++lineno;
        const std::size_t hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail("empty key");
        if (!seen.insert(key).second) fail("duplicate key '" + key + "'");
        try {
            if (key == "experiment") {
                cfg.experiment = value;
            } else if (key == "n") {
                cfg.n = static_cast<int>(to_long(value));
            } else if (key == "f") {
                cfg.f_texts = split_list(value, ';');
            } else if (key == "g") {
                cfg.g_texts = split_list(value, ';');
            } else if (key == "t") {
                for (const auto& piece : split_list(value, ','))
                    cfg.t_grid.push_back(to_double(piece));
            } else if (key == "N") {
                for (const auto& piece : split_list(value, ','))
                    cfg.N_grid.push_back(static_cast<int>(to_long(piece)));
            } else if (key == "tolerance") {
                cfg.tolerance = to_double(value);
            } else if (key == "p") {
                cfg.p = static_cast<int>(to_long(value));
            } else if (key == "k") {
                cfg.k = static_cast<int>(to_long(value));
            } else if (key == "parity") {
                cfg.parity = value;
            } else if (key == "out_dir") {
                cfg.out_dir = value;
            } else if (key == "seed") {
                const long s = to_long(value);
                if (s < 0) fail("seed must be nonnegative");
                cfg.seed = static_cast<unsigned long>(s);
            } else if (key == "workers") {
                cfg.workers = static_cast<int>(to_long(value));
            } else {
                fail("unknown key '" + key + "'");
            }
        } catch (const LineError& e) {
            fail(e.msg);
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::vector<PolySymbol> parse_symbol_list(const std::vector<std::string>& texts, int n) {
    std::vector<PolySymbol> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        try {
            out.push_back(parse_symbol(text, n));
        } catch (const std::exception& e) {
            throw ConfigError("symbol '" + text + "': " + e.what());
        }
    }
    return out;
}

void validate(const ExperimentConfig& cfg) {
    const auto& ids = experiment_ids();
    auto known = [&](const std::string& id) {
        for (const auto& x : ids)
            if (x == id) return true;
        return false;
    };
    auto fail = [](const std::string& msg) -> void { throw ConfigError(msg); };

    if (cfg.experiment.empty()) fail("missing experiment id");
    if (!known(cfg.experiment)) {
        std::string list;
        for (const auto& x : ids) list += (list.empty() ? "" : ", ") + x;
        fail("unknown experiment '" + cfg.experiment + "' (one of: " + list + ")");
    }
    if (cfg.n < 1) fail("dimension n must be >= 1");
    if (cfg.t_grid.empty()) fail("t grid must be nonempty");
    for (double t : cfg.t_grid)
        if (t < -1.0) fail("t values must be >= -1");
    if (cfg.N_grid.empty()) fail("N grid must be nonempty");
    for (int N : cfg.N_grid)
        if (N < 0) fail("N values must be >= 0");
    if (!(cfg.tolerance > 0.0)) fail("tolerance must be > 0");
    if (cfg.workers < 1) fail("workers must be >= 1");
    if (cfg.parity != "odd" && cfg.parity != "even") fail("parity must be odd or even");

    const auto fs = parse_symbol_list(cfg.f_texts, cfg.n);
    const auto gs = parse_symbol_list(cfg.g_texts, cfg.n);
    const std::size_t nf = fs.size(), ng = gs.size();
    const auto need = [&](bool ok, const std::string& msg) {
        if (!ok) fail(cfg.experiment + ": " + msg);
    };

    if (cfg.experiment == "helton-howe") {
        need(nf == 2 * static_cast<std::size_t>(cfg.n), "f must list 2n symbols");
        need(ng == 0, "g is not used");
    } else if (cfg.experiment == "semicommutator-disk") {
        need(cfg.n == 1, "defined on the disk (n = 1)");
        need(nf == 1 && ng == 1, "takes one f and one g");
    } else if (cfg.experiment == "partial-antisym") {
        need(nf == static_cast<std::size_t>(cfg.n), "f must list n symbols");
        need(ng == static_cast<std::size_t>(cfg.n), "g must list n symbols");
    } else if (cfg.experiment == "connes-chern") {
        need(cfg.p >= 1, "p must be >= 1");
        need(cfg.p >= cfg.n, "p must be >= n for trace-class chains");
        need(nf == 2 * static_cast<std::size_t>(cfg.p), "f must list 2p symbols");
        need(ng == 0, "g is not used");
    } else if (cfg.experiment == "quantization-decay") {
        need(nf == 1 && ng == 1, "takes one f and one g");
        need(cfg.k == 0 || cfg.k == 1, "k must be 0 or 1");
        need(cfg.t_grid.size() >= 2, "slope fit needs at least two t values");
        for (double t : cfg.t_grid) need(t > 0.0, "slope fit needs t > 0");
    } else if (cfg.experiment == "hankel-schatten") {
        need(ng == 1, "g must list the Hankel symbol");
        need(nf == 0, "f is not used");
        need(cfg.p >= 1, "p must be >= 1");
        need(cfg.p >= cfg.n, "p must be >= n for Schatten-2p membership");
        need(cfg.p > cfg.n || cfg.n == 1,
             "p = n has a closed right-hand side only on the disk");
    } else if (cfg.experiment == "uncertainty-s4") {
        need(cfg.n == 2, "defined on the two-ball");
        need(nf == 2, "f must list two symbols");
        need(ng == 0, "g is not used (the conjugates are implied)");
    }
}

} // namespace balltrace
