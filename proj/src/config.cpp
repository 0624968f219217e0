#include "hyprec/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hyprec/errors.hpp"

namespace hyprec {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_positive(const std::string& key, const std::string& value) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size() || !std::isfinite(v) || v <= 0.0)
        throw Error(ErrorKind::ConfigError, key + " must be a positive number, got '" + value + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "embeddings") { embeddings = value; return; }
    if (key == "cui_snomed") { cui_snomed = value; return; }
    if (key == "snomed_icd9") { snomed_icd9 = value; return; }
    if (key == "patients") { patients = value; return; }
    if (key == "doctors") { doctors = value; return; }
    if (key == "visits") { visits = value; return; }
    if (key == "diagnoses") { diagnoses = value; return; }
    if (key == "out_dir") { out_dir = value; return; }
    if (key == "tau_days") { tau_days = parse_positive(key, value); return; }
    if (key == "reference_date") {
        reference_date = value.empty() ? std::nullopt : std::optional<Date>(Date::parse(value));
        return;
    }
    if (key == "cutoff_date") {
        cutoff_date = value.empty() ? std::nullopt : std::optional<Date>(Date::parse(value));
        return;
    }
    if (key == "cutoff_quantile") {
        cutoff_quantile = parse_positive(key, value);
        if (cutoff_quantile >= 1.0)
            throw Error(ErrorKind::ConfigError, "cutoff_quantile must lie in (0,1)");
        return;
    }
    if (key == "clamp_eps") {
        clamp_eps = parse_positive(key, value);
        if (clamp_eps >= 0.5) throw Error(ErrorKind::ConfigError, "clamp_eps must be < 0.5");
        return;
    }
    if (key == "top_n") {
        std::vector<std::size_t> ns;
        for (const auto& item : split_list(value)) {
            if (item == "3") ns.push_back(3);
            else if (item == "5") ns.push_back(5);
            else if (item == "10") ns.push_back(10);
            else throw Error(ErrorKind::ConfigError, "top_n entries must be 3, 5 or 10; got '" + item + "'");
        }
        if (ns.empty()) throw Error(ErrorKind::ConfigError, "top_n must not be empty");
        std::sort(ns.begin(), ns.end());
        ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
        top_ns = ns;
        return;
    }
    if (key == "models") {
        std::vector<ModelKind> ms;
        for (const auto& item : split_list(value)) {
            auto m = model_from_string(item);
            if (!m) throw Error(ErrorKind::ConfigError, "unknown model '" + item + "'");
            ms.push_back(*m);
        }
        if (ms.empty()) throw Error(ErrorKind::ConfigError, "models must not be empty");
        std::sort(ms.begin(), ms.end());
        ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
        models = ms;
        return;
    }
    if (key == "affinity_denominator") {
        if (value == "literal") denominator = AffinityDenominator::Literal;
        else if (value == "visited-only") denominator = AffinityDenominator::VisitedOnly;
        else throw Error(ErrorKind::ConfigError, "affinity_denominator must be 'literal' or 'visited-only'");
        return;
    }
    if (key == "seed") {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || p != value.data() + value.size())
            throw Error(ErrorKind::ConfigError, "seed must be a nonnegative integer");
        seed = v;
        return;
    }
    if (key == "threads") {
        unsigned v = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || p != value.data() + value.size())
            throw Error(ErrorKind::ConfigError, "threads must be a nonnegative integer");
        n_threads = v;
        return;
    }
    throw Error(ErrorKind::ConfigError, "unknown config key '" + key + "'");
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open config '" + path + "'");
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::ConfigError,
                        path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        cfg.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }

    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).string();
    };
    resolve(cfg.embeddings);
    resolve(cfg.cui_snomed);
    resolve(cfg.snomed_icd9);
    resolve(cfg.patients);
    resolve(cfg.doctors);
    resolve(cfg.visits);
    resolve(cfg.diagnoses);
    resolve(cfg.out_dir);
    return cfg;
}

void RunConfig::require_data_paths() const {
    auto need = [](const std::string& v, const char* key) {
        if (v.empty()) throw Error(ErrorKind::ConfigError, std::string("missing config key '") + key + "'");
    };
    need(embeddings, "embeddings");
    need(cui_snomed, "cui_snomed");
    need(snomed_icd9, "snomed_icd9");
    need(patients, "patients");
    need(doctors, "doctors");
    need(visits, "visits");
    need(diagnoses, "diagnoses");
}

std::map<std::string, std::string> RunConfig::echo() const {
    std::map<std::string, std::string> m;
    m["embeddings"] = embeddings;
    m["cui_snomed"] = cui_snomed;
    m["snomed_icd9"] = snomed_icd9;
    m["patients"] = patients;
    m["doctors"] = doctors;
    m["visits"] = visits;
    m["diagnoses"] = diagnoses;
    m["out_dir"] = out_dir;
    m["tau_days"] = fmt_double(tau_days);
    m["reference_date"] = reference_date ? reference_date->iso() : "";
    m["cutoff_date"] = cutoff_date ? cutoff_date->iso() : "";
    m["cutoff_quantile"] = fmt_double(cutoff_quantile);
    m["clamp_eps"] = fmt_double(clamp_eps);
    std::string ns;
    for (std::size_t n : top_ns) ns += (ns.empty() ? "" : ",") + std::to_string(n);
    m["top_n"] = ns;
    std::string ms;
    for (ModelKind k : models) ms += (ms.empty() ? "" : ",") + to_string(k);
    m["models"] = ms;
    m["affinity_denominator"] =
        denominator == AffinityDenominator::Literal ? "literal" : "visited-only";
    m["seed"] = std::to_string(seed);
    m["threads"] = std::to_string(n_threads);
    return m;
}

}  // namespace hyprec
