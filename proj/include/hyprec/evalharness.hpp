#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyprec/dates.hpp"
#include "hyprec/ingest.hpp"
#include "hyprec/recsys.hpp"

namespace hyprec {

// Fixed-date temporal split: visits strictly before the cutoff train the
// models, visits on or after it form the per-patient test sets.
struct SplitSpec {
    Date cutoff;
};

struct TemporalSplit {
    InteractionLog train;
    std::map<std::string, std::set<std::string>> test_doctors;  // patient -> distinct doctors
    std::vector<std::string> scored_patients;                   // ascending; train and test nonempty
    std::size_t excluded_no_train = 0;  // nonempty test but no pre-cutoff history
    std::size_t excluded_no_test = 0;   // no post-cutoff visits
    std::size_t test_visits = 0;
};

// Cutoff at the given quantile of the (sorted, duplicate-keeping) visit
// dates, nudged one day past the minimum when the quantile lands on it.
Date cutoff_from_quantile(const InteractionLog& log, double quantile);

TemporalSplit temporal_split(const InteractionLog& log, const SplitSpec& spec);

// Fraction of scored patients whose length-n list intersects their test set.
double hit_rate_at_n(const std::vector<RecommendationList>& lists,
                     const std::map<std::string, std::set<std::string>>& test, std::size_t n);

// Mean over scored patients of |list ∩ test| / n.
double precision_at_n(const std::vector<RecommendationList>& lists,
                      const std::map<std::string, std::set<std::string>>& test, std::size_t n);

struct EvalOptions {
    double tau_days = 365.0;
    std::optional<Date> reference_date;  // default: latest train visit
    AffinityDenominator denominator = AffinityDenominator::Literal;
    std::vector<std::size_t> top_ns = {3, 5, 10};
    std::vector<ModelKind> models = {ModelKind::ConventionalCB, ModelKind::PatientIcdSimilarity,
                                     ModelKind::DoctorIcdSimilarity};
    unsigned n_threads = 0;
};

struct MetricRow {
    ModelKind model;
    std::size_t n = 0;
    double hit_rate = 0.0;
    double precision = 0.0;
};

struct EvalReport {
    std::string cutoff_date;
    std::string reference_date;
    std::size_t train_visits = 0;
    std::size_t test_visits = 0;

    std::size_t patients_retained = 0;
    std::size_t patients_scored = 0;
    std::size_t excluded_no_train = 0;
    std::size_t excluded_no_test = 0;
    std::size_t doctors_total = 0;
    std::size_t doctors_recommendable = 0;

    std::vector<MetricRow> metrics;  // model-major, n ascending
    std::map<std::string, std::string> config_echo;

    std::string to_json() const;     // deterministic; suitable for report.json
    std::string metrics_csv() const; // `model,n,hit_rate,precision` rows
};

// Full offline experiment: split, train every requested model on the train
// side only, score the test sets, and collect HR@n / p@n. The report is a
// pure function of (log, spec, options, echo). HR must be non-decreasing and
// precision non-increasing in n; that law is asserted on every run.
EvalReport run_evaluation(const InteractionLog& log, const CodeMap& map,
                          const EmbeddingTable& table, const SplitSpec& spec,
                          const EvalOptions& opt,
                          const std::map<std::string, std::string>& config_echo = {});

}  // namespace hyprec
