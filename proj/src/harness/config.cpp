#include "hawkes/harness/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hawkes/error.hpp"

namespace hawkes::harness {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(out)) {
        throw ValidationError("config key " + key + ": not a finite number: '" + v + "'");
    }
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long out = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno == ERANGE) {
        throw ValidationError("config key " + key + ": not an unsigned integer: '" + v + "'");
    }
    return out;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

// Hands out values by key and remembers which keys were used.
class Reader {
public:
    explicit Reader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    std::optional<std::string> str(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        std::string v = it->second;
        kv_.erase(it);
        return v;
    }
    std::string str_or(const std::string& key, const std::string& fallback) { return str(key).value_or(fallback); }
    double num(const std::string& key, double fallback) {
        auto v = str(key);
        return v ? to_double(key, *v) : fallback;
    }
    std::optional<double> num(const std::string& key) {
        auto v = str(key);
        if (!v) return std::nullopt;
        return to_double(key, *v);
    }
    double require(const std::string& key) {
        auto v = num(key);
        if (!v) throw ValidationError("missing config key " + key);
        return *v;
    }
    std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
        auto v = str(key);
        return v ? to_u64(key, *v) : fallback;
    }
    std::vector<double> nums(const std::string& key, std::vector<double> fallback) {
        auto v = str(key);
        if (!v) return fallback;
        std::vector<double> out;
        for (const auto& item : split_list(*v)) out.push_back(to_double(key, item));
        return out;
    }
    std::vector<std::size_t> sizes(const std::string& key, std::vector<std::size_t> fallback) {
        auto v = str(key);
        if (!v) return fallback;
        std::vector<std::size_t> out;
        for (const auto& item : split_list(*v)) out.push_back(std::size_t(to_u64(key, item)));
        return out;
    }
    void finish() const {
        if (!kv_.empty()) throw ValidationError("unknown config key: " + kv_.begin()->first);
    }

private:
    std::map<std::string, std::string> kv_;
};

MarkFunction parse_mark_fn(Reader& r, const std::string& prefix) {
    const std::string name = r.str_or("marks." + prefix, "one");
    MarkFunction f;
    if (name == "one") f.kind = MarkFnKind::One;
    else if (name == "identity") f.kind = MarkFnKind::Identity;
    else if (name == "square") f.kind = MarkFnKind::Square;
    else if (name == "affine_clamp") f.kind = MarkFnKind::AffineClamp;
    else throw ValidationError("marks." + prefix + ": unknown function '" + name + "'");
    f.slope = r.num("marks." + prefix + "_slope", 1.0);
    f.intercept = r.num("marks." + prefix + "_intercept", 0.0);
    if (prefix == "b" && f.kind == MarkFnKind::Square) throw ValidationError("marks.b cannot be square");
    return f;
}

MarkDistribution parse_distribution(Reader& r) {
    const std::string name = r.str_or("marks.distribution", "constant");
    if (name == "constant") return ConstantMarks{r.num("marks.c", 1.0)};
    if (name == "uniform") return UniformMarks{r.num("marks.lo", 0.0), r.num("marks.hi", 1.0)};
    if (name == "exponential") return ExponentialMarks{r.num("marks.rate", 1.0)};
    if (name == "discrete") return DiscreteMarks{r.nums("marks.values", {}), r.nums("marks.probs", {})};
    throw ValidationError("marks.distribution: unknown family '" + name + "'");
}

Kernel parse_kernel(Reader& r, const std::filesystem::path& base_dir) {
    const std::string name = r.str_or("kernel.family", "zero");
    const double tol = r.num("kernel.tail_tol", kDefaultKernelTailTol);
    if (name == "zero") return Kernel::zero();
    if (name == "exponential") return Kernel::exponential(r.require("kernel.a"), r.require("kernel.beta"), tol);
    if (name == "erlang") return Kernel::erlang(r.require("kernel.a"), r.require("kernel.beta"), tol);
    if (name == "tabulated") {
        if (auto csv = r.str("kernel.csv")) {
            std::filesystem::path p(*csv);
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            return Kernel::from_csv(p, tol);
        }
        const double step = r.require("kernel.step");
        auto values = r.nums("kernel.values", {});
        if (values.empty()) throw ValidationError("tabulated kernel needs kernel.values or kernel.csv");
        return Kernel::tabulated(step, std::move(values), tol);
    }
    throw ValidationError("kernel.family: unknown family '" + name + "'");
}

Nonlinearity parse_nonlinearity(Reader& r) {
    const std::string name = r.str_or("nonlinearity.family", "linear");
    Nonlinearity h;
    if (name == "linear") h.kind = NonlinearityKind::Linear;
    else if (name == "relu") h.kind = NonlinearityKind::Relu;
    else if (name == "sigmoid") h.kind = NonlinearityKind::Sigmoid;
    else if (name == "softplus") h.kind = NonlinearityKind::Softplus;
    else throw ValidationError("nonlinearity.family: unknown family '" + name + "'");
    h.floor = r.num("nonlinearity.floor", 0.0);
    h.cap = r.num("nonlinearity.cap", 1.0);
    h.scale = r.num("nonlinearity.scale", 1.0);
    return h;
}

}  // namespace

std::size_t power_rule_n(double horizon) {
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
    // floor(T^{2/5}) is the largest k with k^5 <= T^2; correct pow's rounding.
    auto k = (long double)std::floor(std::pow(horizon, 0.4));
    const long double t2 = (long double)horizon * horizon;
    while (k > 0 && k * k * k * k * k > t2) k -= 1;
    while ((k + 1) * (k + 1) * (k + 1) * (k + 1) * (k + 1) <= t2) k += 1;
    return std::size_t(k) + 1;
}

std::size_t ExperimentConfig::n_for(double horizon) const {
    return n_rule == NRule::Power ? power_rule_n(horizon) : fixed_n;
}

void ExperimentConfig::validate() const {
    model.validate();
    auto increasing = [](const std::vector<double>& g, const char* name) {
        if (g.empty()) throw ValidationError(std::string(name) + " must be nonempty");
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!(g[i] > 0.0)) throw ValidationError(std::string(name) + " entries must be positive");
            if (i > 0 && !(g[i] > g[i - 1])) throw ValidationError(std::string(name) + " must be strictly increasing");
        }
    };
    increasing(t_grid, "experiment.T_grid");
    increasing(lemmas_t_grid, "lemmas.T_grid");
    if (replicas < 100) throw ValidationError("experiment.replicas must be >= 100");
    if (n_rule == NRule::Fixed && fixed_n == 0) throw ValidationError("experiment.n must be positive");
    if (!(geometry.strip_width > 0.0 && geometry.block_length > 0.0)) {
        throw ValidationError("field strip width and block length must be positive");
    }
    if (quad_step < 0.0) throw ValidationError("experiment.quad_step must be >= 0");
    for (std::size_t n : discretize_n_grid)
        if (n == 0) throw ValidationError("discretize.n_grid entries must be positive");
    for (std::size_t n : lemmas_n_grid)
        if (n == 0) throw ValidationError("lemmas.n_grid entries must be positive");
    if (discretize_replicas < 100) throw ValidationError("discretize.replicas must be >= 100");
    if (!(simulate_t > 0.0)) throw ValidationError("simulate.T must be positive");
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, value).second) throw ValidationError("duplicate config key: " + key);
    }
    return out;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    Reader r(parse_key_values(text));
    ExperimentConfig cfg;

    Kernel kernel = parse_kernel(r, base_dir);
    const MarkDistribution dist = parse_distribution(r);
    const MarkFunction b = parse_mark_fn(r, "b");
    const MarkFunction g = parse_mark_fn(r, "g");
    cfg.model.kernel = std::move(kernel);
    cfg.model.marks = MarkModel(dist, b, g);
    cfg.model.h = parse_nonlinearity(r);
    cfg.model.mu = r.num("model.mu", 1.0);

    cfg.geometry.strip_width = r.num("field.strip_width", cfg.geometry.strip_width);
    cfg.geometry.block_length = r.num("field.block_length", cfg.geometry.block_length);

    cfg.t_grid = r.nums("experiment.T_grid", cfg.t_grid);
    const std::string rule = r.str_or("experiment.n_rule", "power");
    if (rule == "power") cfg.n_rule = NRule::Power;
    else if (rule == "fixed") cfg.n_rule = NRule::Fixed;
    else throw ValidationError("experiment.n_rule must be power or fixed");
    cfg.fixed_n = std::size_t(r.u64("experiment.n", cfg.fixed_n));
    cfg.replicas = std::size_t(r.u64("experiment.replicas", cfg.replicas));
    cfg.reference_paths = std::size_t(r.u64("experiment.reference_paths", cfg.reference_paths));
    cfg.master_seed = r.u64("experiment.master_seed", cfg.master_seed);
    cfg.quad_step = r.num("experiment.quad_step", cfg.quad_step);
    cfg.output_dir = r.str_or("experiment.output_dir", cfg.output_dir.string());

    cfg.sigma2_burn_in = r.num("sigma2.burn_in", cfg.sigma2_burn_in);
    cfg.sigma2_horizon = r.num("sigma2.horizon", cfg.sigma2_horizon);
    cfg.sigma2_replicas = std::size_t(r.u64("sigma2.replicas", cfg.sigma2_replicas));
    cfg.sigma2_stderr_tol = r.num("sigma2.stderr_tol", cfg.sigma2_stderr_tol);

    cfg.malliavin_u = r.num("malliavin.u", cfg.malliavin_u);
    cfg.malliavin_x = r.num("malliavin.x", cfg.malliavin_x);
    cfg.malliavin_offsets = r.nums("malliavin.offsets", cfg.malliavin_offsets);
    cfg.malliavin_replicas = std::size_t(r.u64("malliavin.replicas", cfg.malliavin_replicas));
    cfg.malliavin_pairs = std::size_t(r.u64("malliavin.pairs", cfg.malliavin_pairs));

    cfg.discretize_t = r.num("discretize.T", cfg.discretize_t);
    cfg.discretize_n_grid = r.sizes("discretize.n_grid", cfg.discretize_n_grid);
    cfg.discretize_replicas = std::size_t(r.u64("discretize.replicas", cfg.discretize_replicas));
    cfg.discretize_audit_spacing = r.num("discretize.audit_spacing", cfg.discretize_audit_spacing);

    cfg.lemmas_t_grid = r.nums("lemmas.T_grid", cfg.lemmas_t_grid);
    cfg.lemmas_n_grid = r.sizes("lemmas.n_grid", cfg.lemmas_n_grid);
    cfg.lemmas_replicas = std::size_t(r.u64("lemmas.replicas", cfg.lemmas_replicas));

    cfg.simulate_t = r.num("simulate.T", cfg.simulate_t);
    cfg.simulate_replicas = std::size_t(r.u64("simulate.replicas", cfg.simulate_replicas));

    r.finish();
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

std::uint64_t config_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace hawkes::harness
