#include "hyprec/evalharness.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "hyprec/errors.hpp"
#include "hyprec/profiles.hpp"

namespace hyprec {

namespace {

void require_scoreable(const TemporalSplit& split) {
    if (split.scored_patients.empty())
        throw Error(ErrorKind::DegenerateSplit, "no patient has both pre- and post-cutoff visits");
}

}  // namespace

Date cutoff_from_quantile(const InteractionLog& log, double quantile) {
    if (!(quantile > 0.0 && quantile < 1.0))
        throw Error(ErrorKind::ConfigError, "cutoff quantile must lie in (0,1)");
    if (log.visits.empty()) throw Error(ErrorKind::DegenerateSplit, "no visits to split");
    std::vector<Date> dates;
    dates.reserve(log.visits.size());
    for (const auto& v : log.visits) dates.push_back(v.date);
    std::sort(dates.begin(), dates.end());
    std::size_t idx = static_cast<std::size_t>(quantile * static_cast<double>(dates.size()));
    idx = std::min(idx, dates.size() - 1);
    Date cutoff = dates[idx];
    if (cutoff == dates.front()) cutoff = cutoff.plus_days(1);
    if (cutoff > dates.back())
        throw Error(ErrorKind::DegenerateSplit, "all visits share one date; no temporal split exists");
    return cutoff;
}

TemporalSplit temporal_split(const InteractionLog& log, const SplitSpec& spec) {
    if (log.visits.empty()) throw Error(ErrorKind::DegenerateSplit, "no visits to split");
    Date lo = log.visits.front().date, hi = lo;
    for (const auto& v : log.visits) {
        lo = std::min(lo, v.date);
        hi = std::max(hi, v.date);
    }
    if (!(lo < spec.cutoff && spec.cutoff <= hi))
        throw Error(ErrorKind::DegenerateSplit, "cutoff " + spec.cutoff.iso() +
                                                    " outside the visit range (" + lo.iso() + ", " +
                                                    hi.iso() + "]");

    TemporalSplit split;
    split.train.patients = log.patients;
    split.train.doctors = log.doctors;
    split.train.diagnoses = log.diagnoses;  // diagnoses are content, not interactions

    std::unordered_set<std::string> has_train;
    for (const auto& v : log.visits) {
        if (v.date < spec.cutoff) {
            split.train.visits.push_back(v);
            has_train.insert(v.patient_id);
        } else {
            split.test_doctors[v.patient_id].insert(v.doctor_id);
            ++split.test_visits;
        }
    }

    for (const auto& p : log.patients) {
        auto it = split.test_doctors.find(p.patient_id);
        if (it == split.test_doctors.end()) {
            ++split.excluded_no_test;
        } else if (!has_train.count(p.patient_id)) {
            ++split.excluded_no_train;
        } else {
            split.scored_patients.push_back(p.patient_id);
        }
    }
    std::sort(split.scored_patients.begin(), split.scored_patients.end());
    require_scoreable(split);
    return split;
}

double hit_rate_at_n(const std::vector<RecommendationList>& lists,
                     const std::map<std::string, std::set<std::string>>& test, std::size_t n) {
    if (lists.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& list : lists) {
        if (list.doctor_ids.size() != n)
            throw Error(ErrorKind::DimensionError, "list for '" + list.patient_id +
                                                       "' has length " +
                                                       std::to_string(list.doctor_ids.size()) +
                                                       ", expected " + std::to_string(n));
        auto it = test.find(list.patient_id);
        if (it == test.end()) continue;
        for (const auto& d : list.doctor_ids)
            if (it->second.count(d)) {
                ++hits;
                break;
            }
    }
    return static_cast<double>(hits) / static_cast<double>(lists.size());
}

double precision_at_n(const std::vector<RecommendationList>& lists,
                      const std::map<std::string, std::set<std::string>>& test, std::size_t n) {
    if (lists.empty()) return 0.0;
    double total = 0.0;
    for (const auto& list : lists) {
        if (list.doctor_ids.size() != n)
            throw Error(ErrorKind::DimensionError, "list for '" + list.patient_id +
                                                       "' has length " +
                                                       std::to_string(list.doctor_ids.size()) +
                                                       ", expected " + std::to_string(n));
        auto it = test.find(list.patient_id);
        if (it == test.end()) continue;
        std::size_t correct = 0;
        for (const auto& d : list.doctor_ids)
            if (it->second.count(d)) ++correct;
        total += static_cast<double>(correct) / static_cast<double>(n);
    }
    return total / static_cast<double>(lists.size());
}

EvalReport run_evaluation(const InteractionLog& log, const CodeMap& map,
                          const EmbeddingTable& table, const SplitSpec& spec,
                          const EvalOptions& opt,
                          const std::map<std::string, std::string>& config_echo) {
    if (opt.top_ns.empty()) throw Error(ErrorKind::ConfigError, "no list lengths requested");
    if (opt.models.empty()) throw Error(ErrorKind::ConfigError, "no models requested");
    TemporalSplit split = temporal_split(log, spec);

    const Date ref = opt.reference_date ? *opt.reference_date : *max_visit_date(split.train);

    // Doctors without a single retained train visitor have no expertise
    // feature and leave the recommendable set.
    std::vector<std::string> excluded_doctors;
    auto doctor_profiles = build_doctor_profiles(split.train, map, table, &excluded_doctors);
    std::vector<std::string> recommendable;
    recommendable.reserve(doctor_profiles.size());
    for (const auto& d : doctor_profiles) recommendable.push_back(d.doctor_id);

    std::size_t max_n = 0;
    for (std::size_t n : opt.top_ns) max_n = std::max(max_n, n);
    if (recommendable.size() < max_n)
        throw Error(ErrorKind::NotEnoughDoctors,
                    "need " + std::to_string(max_n) + " recommendable doctors, have " +
                        std::to_string(recommendable.size()));

    const TrustMatrix trust = trust_weights(split.train, ref, opt.tau_days, &recommendable);

    EvalReport report;
    report.cutoff_date = spec.cutoff.iso();
    report.reference_date = ref.iso();
    report.train_visits = split.train.visits.size();
    report.test_visits = split.test_visits;
    report.patients_retained = log.patients.size();
    report.patients_scored = split.scored_patients.size();
    report.excluded_no_train = split.excluded_no_train;
    report.excluded_no_test = split.excluded_no_test;
    report.doctors_total = log.doctors.size();
    report.doctors_recommendable = recommendable.size();
    report.config_echo = config_echo;

    std::vector<ModelKind> models = opt.models;
    std::sort(models.begin(), models.end());
    models.erase(std::unique(models.begin(), models.end()), models.end());
    std::vector<std::size_t> ns = opt.top_ns;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

    std::optional<SimilarityMatrix> doc_sim, pat_sim;
    std::vector<BenchmarkFeature> bench;
    for (ModelKind m : models) {
        if (m == ModelKind::DoctorIcdSimilarity)
            doc_sim = doctor_similarity(doctor_profiles, opt.n_threads);
        if (m == ModelKind::PatientIcdSimilarity)
            pat_sim = patient_similarity(build_patient_profiles(split.train, map, table),
                                         opt.n_threads);
        if (m == ModelKind::ConventionalCB) bench = benchmark_features(split.train, map, ref);
    }

    for (ModelKind m : models) {
        // Affinities once per patient, lists per n.
        std::map<std::size_t, std::vector<RecommendationList>> lists_by_n;
        for (const auto& pid : split.scored_patients) {
            AffinityVector p;
            switch (m) {
                case ModelKind::ConventionalCB:
                    p = predict_benchmark(pid, trust, bench, opt.denominator);
                    break;
                case ModelKind::PatientIcdSimilarity:
                    p = predict_patient_model(pid, trust, *pat_sim, opt.denominator);
                    break;
                case ModelKind::DoctorIcdSimilarity:
                    p = predict_doctor_model(pid, trust, *doc_sim, opt.denominator);
                    break;
            }
            for (std::size_t n : ns) lists_by_n[n].push_back(recommend_top_n(p, n, m));
        }
        for (std::size_t n : ns) {
            MetricRow row;
            row.model = m;
            row.n = n;
            row.hit_rate = hit_rate_at_n(lists_by_n[n], split.test_doctors, n);
            row.precision = precision_at_n(lists_by_n[n], split.test_doctors, n);
            report.metrics.push_back(row);
        }
    }

    // HR@n must not decrease and p@n must not increase with n; precision can
    // never beat the hit rate. Violations mean the harness itself is broken.
    for (std::size_t i = 0; i < report.metrics.size(); ++i) {
        const auto& row = report.metrics[i];
        if (row.precision > row.hit_rate + 1e-15)
            throw std::logic_error("metric law violated: p@n > HR@n");
        if (i > 0 && report.metrics[i - 1].model == row.model) {
            if (report.metrics[i - 1].hit_rate > row.hit_rate + 1e-15)
                throw std::logic_error("metric law violated: HR@n decreased with n");
            if (report.metrics[i - 1].precision < row.precision - 1e-15)
                throw std::logic_error("metric law violated: p@n increased with n");
        }
    }
    return report;
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["split"] = {{"cutoff_date", cutoff_date},
                  {"reference_date", reference_date},
                  {"train_visits", train_visits},
                  {"test_visits", test_visits}};
    j["cohort"] = {{"patients_retained", patients_retained},
                   {"patients_scored", patients_scored},
                   {"excluded_no_train", excluded_no_train},
                   {"excluded_no_test", excluded_no_test},
                   {"doctors_total", doctors_total},
                   {"doctors_recommendable", doctors_recommendable}};
    j["metrics"] = nlohmann::ordered_json::array();
    for (const auto& row : metrics)
        j["metrics"].push_back({{"model", to_string(row.model)},
                                {"n", row.n},
                                {"hit_rate", row.hit_rate},
                                {"precision", row.precision}});
    j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config_echo) j["config"][k] = v;
    return j.dump(2) + "\n";
}

std::string EvalReport::metrics_csv() const {
    std::string out = "model,n,hit_rate,precision\n";
    char buf[96];
    for (const auto& row : metrics) {
        std::snprintf(buf, sizeof(buf), "%s,%zu,%.17g,%.17g\n", to_string(row.model).c_str(), row.n,
                      row.hit_rate, row.precision);
        out += buf;
    }
    return out;
}

}  // namespace hyprec
