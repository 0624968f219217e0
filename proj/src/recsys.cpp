#include "hyprec/recsys.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "hyprec/errors.hpp"

namespace hyprec {

namespace {

void require_axis_match(const std::vector<std::string>& a, const std::vector<std::string>& b,
                        const char* what) {
    if (a != b)
        throw Error(ErrorKind::DimensionError,
                    std::string("similarity labels do not match the trust matrix's ") + what + " axis");
}

// Shared neighbourhood kernel for the patient-side models: weights over
// patients u != i, numerator sum_u w_u * y_uj.
AffinityVector neighbourhood_predict(const std::string& patient_id, const TrustMatrix& y,
                                     const std::vector<double>& weights, AffinityDenominator den) {
    auto row = y.patient_row(patient_id);
    if (!row) throw Error(ErrorKind::UnknownPatient, "patient '" + patient_id + "' has no trust row");
    const std::size_t n = y.patient_ids.size();
    const std::size_t k = y.doctor_ids.size();

    AffinityVector p;
    p.patient_id = patient_id;
    p.doctor_ids = y.doctor_ids;
    p.scores.assign(k, 0.0);

    if (den == AffinityDenominator::Literal) {
        double denom = 0.0;
        for (std::size_t u = 0; u < n; ++u)
            if (u != *row) denom += weights[u];
        if (denom <= 0.0) {
            p.degenerate_scores = k;  // no usable neighbourhood: zero vector
            return p;
        }
        for (std::size_t j = 0; j < k; ++j) {
            double num = 0.0;
            for (std::size_t u = 0; u < n; ++u)
                if (u != *row) num += weights[u] * y.values.at(u, j);
            p.scores[j] = num / denom;
        }
        return p;
    }

    // Visited-only: denominator restricted to neighbours who visited j.
    for (std::size_t j = 0; j < k; ++j) {
        double num = 0.0, denom = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            if (u == *row) continue;
            const double yuj = y.values.at(u, j);
            num += weights[u] * yuj;
            if (yuj > 0.0) denom += weights[u];
        }
        if (denom > 0.0) {
            p.scores[j] = num / denom;
        } else {
            ++p.degenerate_scores;
        }
    }
    return p;
}

template <typename Profile>
SimilarityMatrix profile_similarity(const std::vector<Profile>& profiles, unsigned n_threads,
                                    auto id_of) {
    if (profiles.size() < 2)
        throw Error(ErrorKind::TooFewEntities, "similarity needs at least two profiles");
    std::vector<std::string> labels;
    std::vector<PoincareVector> features;
    labels.reserve(profiles.size());
    features.reserve(profiles.size());
    for (const auto& p : profiles) {
        labels.push_back(id_of(p));
        features.push_back(p.feature);
    }
    return similarity_from_distances(pairwise_poincare_distances(labels, features, n_threads));
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::ConventionalCB:       return "conventional-cb";
        case ModelKind::PatientIcdSimilarity: return "patient-icd";
        case ModelKind::DoctorIcdSimilarity:  return "doctor-icd";
    }
    return "unknown";
}

std::optional<ModelKind> model_from_string(const std::string& name) {
    if (name == "conventional-cb") return ModelKind::ConventionalCB;
    if (name == "patient-icd") return ModelKind::PatientIcdSimilarity;
    if (name == "doctor-icd") return ModelKind::DoctorIcdSimilarity;
    return std::nullopt;
}

SimilarityMatrix doctor_similarity(const std::vector<DoctorProfile>& profiles, unsigned n_threads) {
    return profile_similarity(profiles, n_threads, [](const DoctorProfile& p) { return p.doctor_id; });
}

SimilarityMatrix patient_similarity(const std::vector<PatientProfile>& profiles, unsigned n_threads) {
    return profile_similarity(profiles, n_threads, [](const PatientProfile& p) { return p.patient_id; });
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw Error(ErrorKind::DimensionError, "cosine: vector lengths " + std::to_string(u.size()) +
                                                   " vs " + std::to_string(v.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu <= 0.0 || nv <= 0.0) return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

AffinityVector predict_doctor_model(const std::string& patient_id, const TrustMatrix& y,
                                    const SimilarityMatrix& s, AffinityDenominator den) {
    require_axis_match(s.labels, y.doctor_ids, "doctor");
    auto row = y.patient_row(patient_id);
    if (!row) throw Error(ErrorKind::UnknownPatient, "patient '" + patient_id + "' has no trust row");
    const std::size_t k = y.doctor_ids.size();

    AffinityVector p;
    p.patient_id = patient_id;
    p.doctor_ids = y.doctor_ids;
    p.scores.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double num = 0.0, denom = 0.0;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double yik = y.values.at(*row, kk);
            num += yik * s.values.at(j, kk);
            if (den == AffinityDenominator::Literal || yik > 0.0) denom += s.values.at(j, kk);
        }
        if (denom > 0.0) {
            p.scores[j] = num / denom;
        } else {
            ++p.degenerate_scores;
        }
    }
    return p;
}

AffinityVector predict_patient_model(const std::string& patient_id, const TrustMatrix& y,
                                     const SimilarityMatrix& s, AffinityDenominator den) {
    require_axis_match(s.labels, y.patient_ids, "patient");
    auto row = y.patient_row(patient_id);
    if (!row) throw Error(ErrorKind::UnknownPatient, "patient '" + patient_id + "' has no trust row");
    std::vector<double> weights(y.patient_ids.size());
    for (std::size_t u = 0; u < weights.size(); ++u) weights[u] = s.values.at(*row, u);
    return neighbourhood_predict(patient_id, y, weights, den);
}

AffinityVector predict_benchmark(const std::string& patient_id, const TrustMatrix& y,
                                 const std::vector<BenchmarkFeature>& features,
                                 AffinityDenominator den) {
    if (features.size() != y.patient_ids.size())
        throw Error(ErrorKind::DimensionError, "benchmark features do not cover the trust patient axis");
    const BenchmarkFeature* self = nullptr;
    for (std::size_t u = 0; u < features.size(); ++u) {
        if (features[u].patient_id != y.patient_ids[u])
            throw Error(ErrorKind::DimensionError,
                        "benchmark features are not aligned with the trust patient axis");
        if (features[u].patient_id == patient_id) self = &features[u];
    }
    if (self == nullptr)
        throw Error(ErrorKind::UnknownPatient, "patient '" + patient_id + "' has no benchmark feature");

    // Negative cosines are floored at zero: similarities act as weights.
    std::vector<double> weights(features.size());
    for (std::size_t u = 0; u < features.size(); ++u)
        weights[u] = std::max(cosine_similarity(self->vec, features[u].vec), 0.0);
    return neighbourhood_predict(patient_id, y, weights, den);
}

RecommendationList recommend_top_n(const AffinityVector& p, std::size_t n, ModelKind model) {
    if (n != 3 && n != 5 && n != 10)
        throw Error(ErrorKind::ConfigError, "list length must be 3, 5 or 10; got " + std::to_string(n));
    if (p.doctor_ids.size() < n)
        throw Error(ErrorKind::NotEnoughDoctors,
                    "need " + std::to_string(n) + " recommendable doctors, have " +
                        std::to_string(p.doctor_ids.size()));

    std::vector<std::size_t> order(p.doctor_ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (p.scores[a] != p.scores[b]) return p.scores[a] > p.scores[b];
        return p.doctor_ids[a] < p.doctor_ids[b];
    });

    RecommendationList list;
    list.patient_id = p.patient_id;
    list.model = model;
    list.doctor_ids.reserve(n);
    list.affinities.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        list.doctor_ids.push_back(p.doctor_ids[order[i]]);
        list.affinities.push_back(p.scores[order[i]]);
    }
    return list;
}

void write_recommendations_csv(const std::string& path,
                               const std::vector<RecommendationList>& lists) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + path + "'");
    out << "patient_id,rank,doctor_id,affinity\n";
    char buf[32];
    for (const auto& list : lists)
        for (std::size_t i = 0; i < list.doctor_ids.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", list.affinities[i]);
            out << list.patient_id << ',' << (i + 1) << ',' << list.doctor_ids[i] << ',' << buf << '\n';
        }
}

}  // namespace hyprec
