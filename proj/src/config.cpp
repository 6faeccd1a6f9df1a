#include "ham/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ham/errors.hpp"

namespace ham {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void check_key(const std::string& key, const std::string& where) {
    const auto& k = known_config_keys();
    if (std::find(k.begin(), k.end(), key) == k.end()) throw ConfigError("unknown key '" + key + "' (" + where + ")");
}

const std::string* find(const ConfigMap& m, const std::string& key) {
    const auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
}

const std::string& require(const ConfigMap& m, const std::string& key) {
    const std::string* v = find(m, key);
    if (!v) throw ConfigError("missing key '" + key + "'");
    return *v;
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError("bad number for '" + key + "': " + v);
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    long long x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError("bad integer for '" + key + "': " + v);
    return x;
}

double get_double(const ConfigMap& m, const std::string& key, double def) {
    const std::string* v = find(m, key);
    return v ? to_double(key, *v) : def;
}

long long get_int(const ConfigMap& m, const std::string& key, long long def) {
    const std::string* v = find(m, key);
    return v ? to_int(key, *v) : def;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "dimension",   "temporal.kind", "temporal.alpha0", "temporal.c", "spatial.kind", "spatial.beta",
        "spatial.beta1", "spatial.beta2", "spatial.sigma", "spatial.mass", "t",       "radii",
        "p_max",       "grid.nt",       "grid.nx",         "mc.samples", "mc.seed",     "quad.tol",
        "quad.max_evals", "out.dir"};
    return keys;
}

ConfigMap parse_config_text(const std::string& text, const std::string& origin) {
    ConfigMap m;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header (" + where + ")");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value (" + where + ")");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty()) {
            const auto& k = known_config_keys();
            const std::string full = section + "." + key;
            if (std::find(k.begin(), k.end(), full) != k.end() || std::find(k.begin(), k.end(), key) == k.end())
                key = full;
        }
        check_key(key, where);
        m[key] = trim(line.substr(eq + 1));
    }
    return m;
}

ConfigMap read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

void apply_overrides(ConfigMap& m, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override must be key=value: " + o);
        const std::string key = trim(o.substr(0, eq));
        check_key(key, "--set");
        m[key] = trim(o.substr(eq + 1));
    }
}

Scenario scenario_from_config(const ConfigMap& m) {
    Scenario sc;
    sc.dim = static_cast<int>(to_int("dimension", require(m, "dimension")));
    if (sc.dim != 1 && sc.dim != 2) throw ConfigError("dimension must be 1 or 2");

    const std::string& tk = require(m, "temporal.kind");
    if (tk == "constant") {
        sc.temporal = TemporalKernel::constant(1.0);
        sc.temporal.c = get_double(m, "temporal.c", 1.0);
    } else if (tk == "riesz") {
        const double a = to_double("temporal.alpha0", require(m, "temporal.alpha0"));
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("temporal.alpha0 must lie in (0, 1)");
        sc.temporal = TemporalKernel::riesz(a);
    } else {
        throw ConfigError("temporal.kind must be constant or riesz, got '" + tk + "'");
    }

    const std::string& sk = require(m, "spatial.kind");
    try {
        if (sk == "gaussian") {
            sc.spatial = SpatialKernel::gaussian(sc.dim, get_double(m, "spatial.sigma", 1.0),
                                                 get_double(m, "spatial.mass", 2.5066282746310002));
        } else if (sk == "riesz") {
            sc.spatial = SpatialKernel::riesz(sc.dim, to_double("spatial.beta", require(m, "spatial.beta")));
        } else if (sk == "product") {
            if (sc.dim != 2) throw ConfigError("spatial.kind = product needs dimension = 2");
            // a factor without an exponent is the unit gaussian
            auto factor = [&](const std::string& key) {
                const std::string* b = find(m, key);
                return b ? Kernel1D::riesz(to_double(key, *b)) : Kernel1D::gaussian();
            };
            if (!find(m, "spatial.beta1") && !find(m, "spatial.beta2")) throw ConfigError("missing key 'spatial.beta1'");
            sc.spatial = SpatialKernel::product(factor("spatial.beta1"), factor("spatial.beta2"));
        } else {
            throw ConfigError("spatial.kind must be gaussian, riesz or product, got '" + sk + "'");
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("spatial: ") + e.what());
    }

    sc.t = get_double(m, "t", sc.t);
    if (const std::string* r = find(m, "radii")) {
        sc.radii.clear();
        std::istringstream in(*r);
        std::string item;
        while (std::getline(in, item, ',')) sc.radii.push_back(to_double("radii", trim(item)));
    }
    sc.p_max = static_cast<int>(get_int(m, "p_max", sc.p_max));
    sc.grid_nt = static_cast<int>(get_int(m, "grid.nt", sc.grid_nt));
    sc.grid_nx = static_cast<int>(get_int(m, "grid.nx", sc.grid_nx));
    sc.mc_samples = static_cast<long>(get_int(m, "mc.samples", sc.mc_samples));
    const long long seed = get_int(m, "mc.seed", static_cast<long long>(sc.mc_seed));
    if (seed <= 0) throw ConfigError("mc.seed must be positive");
    sc.mc_seed = static_cast<unsigned long long>(seed);
    sc.quad.tol = get_double(m, "quad.tol", sc.quad.tol);
    sc.quad.max_evals = static_cast<long>(get_int(m, "quad.max_evals", sc.quad.max_evals));
    if (const std::string* d = find(m, "out.dir")) sc.out_dir = *d;
    sc.validate();
    return sc;
}

std::string canonical_scenario(const Scenario& sc) {
    std::ostringstream os;
    os << "dimension=" << sc.dim;
    if (sc.temporal.is_constant())
        os << ";temporal=constant:" << fmt(sc.temporal.c);
    else
        os << ";temporal=riesz:" << fmt(sc.temporal.alpha0);
    const SpatialKernel& s = sc.spatial;
    switch (s.kind) {
        case SpatialKernel::Kind::Gaussian: os << ";spatial=gaussian:" << fmt(s.sigma) << ":" << fmt(s.mass); break;
        case SpatialKernel::Kind::Riesz: os << ";spatial=riesz:" << fmt(s.beta); break;
        case SpatialKernel::Kind::Product:
            os << ";spatial=product";
            for (const Kernel1D* f : {&s.f1, &s.f2})
                os << (f->kind == Kernel1D::Kind::Riesz ? ":riesz:" + fmt(f->beta) : ":gaussian");
            break;
    }
    os << ";t=" << fmt(sc.t) << ";radii=";
    for (std::size_t i = 0; i < sc.radii.size(); ++i) os << (i ? "," : "") << fmt(sc.radii[i]);
    os << ";p_max=" << sc.p_max << ";grid=" << sc.grid_nt << "x" << sc.grid_nx << ";mc=" << sc.mc_samples << ":"
       << sc.mc_seed << ";quad=" << fmt(sc.quad.tol) << ":" << sc.quad.max_evals;
    return os.str();
}

std::string scenario_hash(const Scenario& sc) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_scenario(sc)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ham
