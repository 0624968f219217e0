// hyprec command-line driver: generate / ingest / build / recommend / evaluate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyprec/config.hpp"
#include "hyprec/errors.hpp"
#include "hyprec/evalharness.hpp"
#include "hyprec/ingest.hpp"
#include "hyprec/profiles.hpp"
#include "hyprec/recsys.hpp"
#include "hyprec/synthgen.hpp"

namespace {

using namespace hyprec;
namespace fs = std::filesystem;

struct LoadedData {
    EmbeddingTable table;
    CodeMap map;
    InteractionLog log;
    IngestReport report;
};

LoadedData load_pipeline(const RunConfig& cfg) {
    cfg.require_data_paths();
    LoadedData d;
    d.table = load_embeddings(cfg.embeddings, d.report, cfg.clamp_eps);
    d.map = build_code_map(cfg.cui_snomed, cfg.snomed_icd9, d.table, d.report);
    d.log = load_interactions(cfg.patients, cfg.doctors, cfg.visits, cfg.diagnoses, d.map, d.report);
    return d;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + path.string() + "'");
    out << body;
    std::cout << "wrote " << path.string() << "\n";
}

void write_matrix_tsv(const fs::path& path, const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels, const DenseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + path.string() + "'");
    out << "id";
    for (const auto& c : col_labels) out << '\t' << c;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << row_labels[i];
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m.at(i, j));
            out << '\t' << buf;
        }
        out << '\n';
    }
    std::cout << "wrote " << path.string() << "\n";
}

Date pick_reference_date(const RunConfig& cfg, const InteractionLog& log) {
    if (cfg.reference_date) return *cfg.reference_date;
    auto latest = max_visit_date(log);
    if (!latest) throw Error(ErrorKind::DegenerateSplit, "log has no visits");
    return *latest;
}

int cmd_ingest(const RunConfig& cfg) {
    LoadedData d = load_pipeline(cfg);
    fs::create_directories(cfg.out_dir);
    write_file(fs::path(cfg.out_dir) / "ingest_report.json", d.report.to_json(cfg.echo()));
    return 0;
}

int cmd_build(const RunConfig& cfg) {
    LoadedData d = load_pipeline(cfg);
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    write_file(out / "ingest_report.json", d.report.to_json(cfg.echo()));

    const Date ref = pick_reference_date(cfg, d.log);
    auto patient_profiles = build_patient_profiles(d.log, d.map, d.table);
    std::vector<std::string> excluded;
    auto doctor_profiles = build_doctor_profiles(d.log, d.map, d.table, &excluded);
    if (doctor_profiles.empty()) throw Error(ErrorKind::EmptyExpertise, "no doctor has a retained visitor");

    write_profiles_tsv((out / "profiles.tsv").string(), patient_profiles, doctor_profiles);
    std::cout << "wrote " << (out / "profiles.tsv").string() << "\n";

    std::vector<std::string> recommendable;
    for (const auto& p : doctor_profiles) recommendable.push_back(p.doctor_id);
    const TrustMatrix trust = trust_weights(d.log, ref, cfg.tau_days, &recommendable);
    write_matrix_tsv(out / "trust.tsv", trust.patient_ids, trust.doctor_ids, trust.values);

    if (patient_profiles.size() >= 2) {
        const auto s = patient_similarity(patient_profiles, cfg.n_threads);
        write_matrix_tsv(out / "patient_similarity.tsv", s.labels, s.labels, s.values);
    }
    if (doctor_profiles.size() >= 2) {
        const auto s = doctor_similarity(doctor_profiles, cfg.n_threads);
        write_matrix_tsv(out / "doctor_similarity.tsv", s.labels, s.labels, s.values);
    }
    return 0;
}

int cmd_recommend(const RunConfig& cfg, const std::string& patient, bool all, std::size_t n,
                  const std::string& model_name) {
    auto model = model_from_string(model_name);
    if (!model) throw Error(ErrorKind::UsageError, "unknown model '" + model_name + "'");

    LoadedData d = load_pipeline(cfg);
    const Date ref = pick_reference_date(cfg, d.log);

    std::vector<std::string> excluded;
    auto doctor_profiles = build_doctor_profiles(d.log, d.map, d.table, &excluded);
    std::vector<std::string> recommendable;
    for (const auto& p : doctor_profiles) recommendable.push_back(p.doctor_id);
    const TrustMatrix trust = trust_weights(d.log, ref, cfg.tau_days, &recommendable);

    std::vector<std::string> targets;
    if (all) {
        targets = trust.patient_ids;
    } else {
        if (patient.empty()) throw Error(ErrorKind::UsageError, "need --patient <id> or --all");
        targets.push_back(patient);
    }

    std::optional<SimilarityMatrix> sim;
    std::vector<BenchmarkFeature> bench;
    switch (*model) {
        case ModelKind::DoctorIcdSimilarity:
            sim = doctor_similarity(doctor_profiles, cfg.n_threads);
            break;
        case ModelKind::PatientIcdSimilarity:
            sim = patient_similarity(build_patient_profiles(d.log, d.map, d.table),
                                     cfg.n_threads);
            break;
        case ModelKind::ConventionalCB:
            bench = benchmark_features(d.log, d.map, ref);
            break;
    }

    std::vector<RecommendationList> lists;
    for (const auto& pid : targets) {
        AffinityVector p;
        switch (*model) {
            case ModelKind::DoctorIcdSimilarity:
                p = predict_doctor_model(pid, trust, *sim, cfg.denominator);
                break;
            case ModelKind::PatientIcdSimilarity:
                p = predict_patient_model(pid, trust, *sim, cfg.denominator);
                break;
            case ModelKind::ConventionalCB:
                p = predict_benchmark(pid, trust, bench, cfg.denominator);
                break;
        }
        lists.push_back(recommend_top_n(p, n, *model));
    }

    fs::create_directories(cfg.out_dir);
    const fs::path path = fs::path(cfg.out_dir) /
                          ("recs_" + to_string(*model) + "_" + std::to_string(n) + ".csv");
    write_recommendations_csv(path.string(), lists);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    LoadedData d = load_pipeline(cfg);

    SplitSpec spec;
    spec.cutoff = cfg.cutoff_date ? *cfg.cutoff_date : cutoff_from_quantile(d.log, cfg.cutoff_quantile);

    EvalOptions opt;
    opt.tau_days = cfg.tau_days;
    opt.reference_date = cfg.reference_date;
    opt.denominator = cfg.denominator;
    opt.top_ns = cfg.top_ns;
    opt.models = cfg.models;
    opt.n_threads = cfg.n_threads;

    const EvalReport report = run_evaluation(d.log, d.map, d.table, spec, opt, cfg.echo());

    fs::create_directories(cfg.out_dir);
    write_file(fs::path(cfg.out_dir) / "report.json", report.to_json());
    write_file(fs::path(cfg.out_dir) / "metrics.csv", report.metrics_csv());
    return 0;
}

void print_error(ErrorKind kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = std::string(to_string(kind));
    j["message"] = message;
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperbolic patient-doctor recommendation engine"};
    app.require_subcommand(1);

    // generate -----------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
    SynthParams params;
    std::string gen_out;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--seed", params.seed, "RNG seed");
    gen->add_option("--branching", params.branching, "hierarchy branching factor");
    gen->add_option("--depth", params.depth, "hierarchy depth");
    gen->add_option("--patients", params.n_patients, "number of patients");
    gen->add_option("--doctors", params.n_doctors, "number of doctors");
    gen->add_option("--visits-per-patient", params.visits_per_patient, "visits per patient");
    gen->add_option("--codes-per-patient", params.codes_per_patient, "diagnosis codes per patient");
    gen->add_option("--affinity-sharpness", params.affinity_sharpness,
                    "softmax sharpness of the doctor choice");
    gen->add_option("--radius-step", params.radius_step, "hyperbolic radius per tree level");

    // shared config options ------------------------------------------------
    std::string config_path;
    std::vector<std::string> overrides;
    auto add_config_opts = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file")->required();
        cmd->add_option("--set", overrides, "override a config key (key=value)");
    };

    auto* ingest_cmd = app.add_subcommand("ingest", "load data and write the ingest report");
    add_config_opts(ingest_cmd);
    auto* build_cmd = app.add_subcommand("build", "dump profiles, trust and similarity matrices");
    add_config_opts(build_cmd);

    auto* rec = app.add_subcommand("recommend", "rank doctors for one patient or all");
    add_config_opts(rec);
    std::string rec_patient, rec_model = "doctor-icd";
    bool rec_all = false;
    std::size_t rec_n = 5;
    rec->add_option("--patient", rec_patient, "patient id");
    rec->add_flag("--all", rec_all, "recommend for every patient");
    rec->add_option("--n", rec_n, "list length")->check(CLI::IsMember({3, 5, 10}));
    rec->add_option("--model", rec_model, "conventional-cb | patient-icd | doctor-icd");

    auto* eval = app.add_subcommand("evaluate", "temporal-split evaluation; writes report + metrics");
    add_config_opts(eval);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        print_error(ErrorKind::UsageError, e.what());
        return 2;
    }

    try {
        if (gen->parsed()) {
            params.validate();
            const CodeTree tree = generate_hierarchy(params);
            const EmbeddingTable table = layout_tree_embeddings(tree, params);
            simulate_population(tree, table, params, gen_out);
            std::cout << "generated " << gen_out << "\n";
            return 0;
        }

        RunConfig cfg = RunConfig::load(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorKind::UsageError, "--set expects key=value, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }

        if (ingest_cmd->parsed()) return cmd_ingest(cfg);
        if (build_cmd->parsed()) return cmd_build(cfg);
        if (rec->parsed()) return cmd_recommend(cfg, rec_patient, rec_all, rec_n, rec_model);
        if (eval->parsed()) return cmd_evaluate(cfg);
        print_error(ErrorKind::UsageError, "no subcommand");
        return 2;
    } catch (const Error& e) {
        print_error(e.kind(), e.what());
        return e.kind() == ErrorKind::UsageError ? 2 : 1;
    } catch (const std::exception& e) {
        nlohmann::ordered_json j;
        j["error"] = "InternalError";
        j["message"] = e.what();
        std::cerr << j.dump() << "\n";
        return 1;
    }
}
