#include "hyprec/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "hyprec/errors.hpp"
#include "hyprec/geometry.hpp"

namespace hyprec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Platform-stable draws on top of the standardized mt19937_64 stream:
// distributions from <random> are implementation-defined, these are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n).
    std::uint64_t next_index(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

private:
    std::mt19937_64 gen_;
};

std::string code_for_index(std::size_t i) {
    char buf[32];
    if (i < 1000) {
        std::snprintf(buf, sizeof(buf), "%03zu", i);
    } else {
        std::snprintf(buf, sizeof(buf), "%03zu.%02zu", i / 100, i % 100);
    }
    return buf;
}

std::string padded_id(char prefix, std::size_t i, std::size_t total) {
    int width = 1;
    for (std::size_t t = total; t >= 10; t /= 10) ++width;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%c%0*zu", prefix, std::min(width, 19), i + 1);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + p.string() + "'");
    return out;
}

void write_double(std::ofstream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

}  // namespace

void SynthParams::validate() const {
    if (branching < 2) throw Error(ErrorKind::ConfigError, "branching must be >= 2");
    if (depth < 2) throw Error(ErrorKind::ConfigError, "depth must be >= 2");
    if (n_patients == 0 || n_doctors == 0)
        throw Error(ErrorKind::ConfigError, "population sizes must be positive");
    if (visits_per_patient < 1 || codes_per_patient < 1)
        throw Error(ErrorKind::ConfigError, "visits_per_patient and codes_per_patient must be >= 1");
    if (!(affinity_sharpness >= 0.0) || !std::isfinite(affinity_sharpness))
        throw Error(ErrorKind::ConfigError, "affinity_sharpness must be >= 0");
    if (!(radius_step > 0.0) || !std::isfinite(radius_step))
        throw Error(ErrorKind::ConfigError, "radius_step must be > 0");
    if (window_days < 2) throw Error(ErrorKind::ConfigError, "window_days must be >= 2");
    double count = (std::pow(branching, depth + 1) - 1) / (branching - 1);
    if (count > 100000.0)
        throw Error(ErrorKind::ConfigError, "hierarchy too large for the code identifier scheme");
}

int CodeTree::tree_distance(std::size_t a, std::size_t b) const {
    int da = nodes[a].depth, db = nodes[b].depth, dist = 0;
    while (da > db) {
        a = static_cast<std::size_t>(nodes[a].parent);
        --da;
        ++dist;
    }
    while (db > da) {
        b = static_cast<std::size_t>(nodes[b].parent);
        --db;
        ++dist;
    }
    while (a != b) {
        a = static_cast<std::size_t>(nodes[a].parent);
        b = static_cast<std::size_t>(nodes[b].parent);
        dist += 2;
    }
    return dist;
}

std::vector<std::size_t> CodeTree::leaves() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].depth == depth) out.push_back(i);
    return out;
}

CodeTree generate_hierarchy(const SynthParams& params) {
    params.validate();
    CodeTree tree;
    tree.branching = params.branching;
    tree.depth = params.depth;
    tree.nodes.push_back({code_for_index(0), -1, 0});
    std::size_t level_begin = 0, level_end = 1;
    for (int d = 1; d <= params.depth; ++d) {
        const std::size_t next_begin = tree.nodes.size();
        for (std::size_t p = level_begin; p < level_end; ++p)
            for (int c = 0; c < params.branching; ++c)
                tree.nodes.push_back({code_for_index(tree.nodes.size()), static_cast<int>(p), d});
        level_begin = next_begin;
        level_end = tree.nodes.size();
    }
    return tree;
}

EmbeddingTable layout_tree_embeddings(const CodeTree& tree, const SynthParams& params) {
    params.validate();
    EmbeddingTable table;
    table.dim = 2;

    // Angular sector per node, split evenly among the children.
    std::vector<std::pair<double, double>> sector(tree.nodes.size(), {0.0, kTwoPi});
    std::vector<int> child_rank(tree.nodes.size(), 0);
    std::vector<int> seen_children(tree.nodes.size(), 0);
    for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
        const auto parent = static_cast<std::size_t>(tree.nodes[i].parent);
        child_rank[i] = seen_children[parent]++;
    }
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        PoincareVector v;
        if (tree.nodes[i].parent < 0) {
            v.c = {0.0, 0.0};
        } else {
            const auto parent = static_cast<std::size_t>(tree.nodes[i].parent);
            const auto [lo, hi] = sector[parent];
            const double width = (hi - lo) / params.branching;
            const double a = lo + child_rank[i] * width;
            sector[i] = {a, a + width};
            const double angle = a + width / 2.0;
            const double radius = std::tanh(tree.nodes[i].depth * params.radius_step / 2.0);
            v.c = {radius * std::cos(angle), radius * std::sin(angle)};
        }
        clamp_to_ball(v.c);
        table.entries.emplace(tree.nodes[i].code, std::move(v));
    }
    return table;
}

void simulate_population(const CodeTree& tree, const EmbeddingTable& table,
                         const SynthParams& params, const std::string& out_dir) {
    params.validate();
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    Rng rng(params.seed);

    // Branch pool: nodes at depth min(2, depth); patients draw codes from the
    // subtree rooted there.
    const int branch_depth = std::min(2, tree.depth);
    std::vector<std::size_t> branch_pool;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i)
        if (tree.nodes[i].depth == branch_depth) branch_pool.push_back(i);
    std::vector<std::vector<std::size_t>> branch_subtree(branch_pool.size());
    for (std::size_t b = 0; b < branch_pool.size(); ++b)
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            std::size_t a = i;
            while (tree.nodes[a].depth > branch_depth) a = static_cast<std::size_t>(tree.nodes[a].parent);
            if (a == branch_pool[b] && tree.nodes[i].depth >= branch_depth)
                branch_subtree[b].push_back(i);
        }
    const auto leaf_pool = tree.leaves();

    static const char* kGenders[] = {"F", "M"};
    static const char* kRegions[] = {"east", "north", "south", "west"};
    static const char* kHospitals[] = {"H1", "H2", "H3", "H4", "H5"};

    // Draw order: doctors (attributes + anchor), then patients (attributes,
    // branch, codes + dates), then visits (doctor + date per visit),
    // everything in ascending entity order.
    struct Doctor {
        std::string id, gender, hospital;
        int birth_year;
        std::size_t anchor;
    };
    std::vector<Doctor> doctors(params.n_doctors);
    for (std::size_t j = 0; j < params.n_doctors; ++j) {
        doctors[j].id = padded_id('D', j, params.n_doctors);
        doctors[j].gender = kGenders[rng.next_index(2)];
        doctors[j].birth_year = 1950 + static_cast<int>(rng.next_index(36));
        doctors[j].hospital = kHospitals[rng.next_index(5)];
        doctors[j].anchor = leaf_pool[rng.next_index(leaf_pool.size())];
    }

    struct Patient {
        std::string id, gender, region;
        int birth_year;
        std::size_t branch;
        std::vector<std::pair<std::string, Date>> diagnoses;
        PoincareVector feature;
    };
    std::vector<Patient> patients(params.n_patients);
    for (std::size_t i = 0; i < params.n_patients; ++i) {
        auto& p = patients[i];
        p.id = padded_id('P', i, params.n_patients);
        p.gender = kGenders[rng.next_index(2)];
        p.birth_year = 1940 + static_cast<int>(rng.next_index(66));
        p.region = kRegions[rng.next_index(4)];
        p.branch = rng.next_index(branch_pool.size());
        std::vector<PoincareVector> code_points;
        for (int c = 0; c < params.codes_per_patient; ++c) {
            const auto& subtree = branch_subtree[p.branch];
            const std::size_t node = subtree[rng.next_index(subtree.size())];
            const Date date = params.start_date.plus_days(
                static_cast<std::int32_t>(rng.next_index(params.window_days)));
            p.diagnoses.emplace_back(tree.nodes[node].code, date);
            code_points.push_back(*table.find(tree.nodes[node].code));
        }
        p.feature = hyperbolic_average(code_points);
    }

    struct Visit {
        std::string patient_id, doctor_id;
        Date date;
    };
    std::vector<Visit> visits;
    visits.reserve(params.n_patients * params.visits_per_patient);
    std::vector<double> cdf(params.n_doctors);
    for (auto& p : patients) {
        double total = 0.0;
        for (std::size_t j = 0; j < params.n_doctors; ++j) {
            const PoincareVector& anchor = *table.find(tree.nodes[doctors[j].anchor].code);
            total += std::exp(-params.affinity_sharpness * poincare_distance(p.feature, anchor));
            cdf[j] = total;
        }
        for (int v = 0; v < params.visits_per_patient; ++v) {
            const double u = rng.next_double() * total;
            const std::size_t j = static_cast<std::size_t>(
                std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            const Date date = params.start_date.plus_days(
                static_cast<std::int32_t>(rng.next_index(params.window_days)));
            visits.push_back({p.id, doctors[std::min(j, params.n_doctors - 1)].id, date});
        }
    }

    // --- file set -----------------------------------------------------------
    {
        auto out = open_out(dir / "embeddings.tsv");
        out << "#dim=2\n";
        for (const auto& node : tree.nodes) {
            const PoincareVector& v = *table.find(node.code);
            out << node.code;
            for (double x : v.c) {
                out << '\t';
                write_double(out, x);
            }
            out << '\n';
        }
    }
    {
        // Identity terminology chain: every code maps to itself.
        auto cs = open_out(dir / "cui_snomed.csv");
        cs << "cui,snomed\n";
        auto si = open_out(dir / "snomed_icd9.csv");
        si << "snomed,icd9\n";
        for (const auto& node : tree.nodes) {
            cs << node.code << ',' << node.code << '\n';
            si << node.code << ',' << node.code << '\n';
        }
    }
    {
        auto out = open_out(dir / "patients.csv");
        out << "patient_id,gender,birth_year,region\n";
        for (const auto& p : patients)
            out << p.id << ',' << p.gender << ',' << p.birth_year << ',' << p.region << '\n';
    }
    {
        auto out = open_out(dir / "doctors.csv");
        out << "doctor_id,gender,birth_year,hospital\n";
        for (const auto& d : doctors)
            out << d.id << ',' << d.gender << ',' << d.birth_year << ',' << d.hospital << '\n';
    }
    {
        auto out = open_out(dir / "visits.csv");
        out << "patient_id,doctor_id,date\n";
        for (const auto& v : visits)
            out << v.patient_id << ',' << v.doctor_id << ',' << v.date.iso() << '\n';
    }
    {
        auto out = open_out(dir / "diagnoses.csv");
        out << "patient_id,icd9_code,date\n";
        for (const auto& p : patients)
            for (const auto& [code, date] : p.diagnoses)
                out << p.id << ',' << code << ',' << date.iso() << '\n';
    }
    {
        nlohmann::ordered_json j;
        j["seed"] = params.seed;
        auto anchors = nlohmann::ordered_json::object();
        for (const auto& d : doctors) anchors[d.id] = tree.nodes[d.anchor].code;
        j["doctor_anchors"] = anchors;
        auto branches = nlohmann::ordered_json::object();
        for (const auto& p : patients) branches[p.id] = tree.nodes[branch_pool[p.branch]].code;
        j["patient_branches"] = branches;
        open_out(dir / "ground_truth.json") << j.dump(2) << '\n';
    }
    {
        auto out = open_out(dir / "config.ini");
        out << "# synthetic dataset, seed " << params.seed << "\n"
            << "embeddings = embeddings.tsv\n"
            << "cui_snomed = cui_snomed.csv\n"
            << "snomed_icd9 = snomed_icd9.csv\n"
            << "patients = patients.csv\n"
            << "doctors = doctors.csv\n"
            << "visits = visits.csv\n"
            << "diagnoses = diagnoses.csv\n"
            << "out_dir = out\n"
            << "seed = " << params.seed << "\n";
    }
}

}  // namespace hyprec
