#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyprec/geometry.hpp"
#include "hyprec/profiles.hpp"

namespace hyprec {

enum class ModelKind {
    ConventionalCB,         // cosine over demographics + one-hot ICD-9
    PatientIcdSimilarity,   // hyperbolic patient-patient similarity
    DoctorIcdSimilarity,    // hyperbolic doctor-doctor similarity
};

std::string to_string(ModelKind kind);
std::optional<ModelKind> model_from_string(const std::string& name);

// How the affinity denominator is taken: over every entity (the default) or
// only over entities with a nonzero interaction. The latter is a sensitivity
// variant, not the default scoring path.
enum class AffinityDenominator {
    Literal,
    VisitedOnly,
};

// Predicted affinity of one patient towards every recommendable doctor.
// `degenerate_scores` counts doctors whose denominator collapsed to zero
// (their affinity is reported as 0).
struct AffinityVector {
    std::string patient_id;
    std::vector<std::string> doctor_ids;
    std::vector<double> scores;
    std::size_t degenerate_scores = 0;
};

// Ranked top-n doctors for one patient under one model. Already-visited
// doctors stay eligible; ties break on ascending doctor_id.
struct RecommendationList {
    std::string patient_id;
    ModelKind model;
    std::vector<std::string> doctor_ids;
    std::vector<double> affinities;
};

// Pairwise hyperbolic similarity over doctor features (min-max scaled,
// inverted distances). Requires at least two profiles.
SimilarityMatrix doctor_similarity(const std::vector<DoctorProfile>& profiles,
                                   unsigned n_threads = 0);

// Same construction over patient features.
SimilarityMatrix patient_similarity(const std::vector<PatientProfile>& profiles,
                                    unsigned n_threads = 0);

// u.v / (|u||v|); 0 when either vector is all zeros.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// p_ij = sum_k y_ik s_jk / sum_k s_jk over the recommendable doctors.
// Similarity labels must equal the trust matrix's doctor axis.
AffinityVector predict_doctor_model(const std::string& patient_id, const TrustMatrix& y,
                                    const SimilarityMatrix& s,
                                    AffinityDenominator den = AffinityDenominator::Literal);

// Patient-side analogue: p_ij = sum_{u != i} s_iu y_uj / sum_{u != i} s_iu.
// The target patient is excluded from their own neighborhood.
AffinityVector predict_patient_model(const std::string& patient_id, const TrustMatrix& y,
                                     const SimilarityMatrix& s,
                                     AffinityDenominator den = AffinityDenominator::Literal);

// Patient-side analogue with on-the-fly neighbor weights
// max(cosine(f_i, f_u), 0) over the benchmark features.
AffinityVector predict_benchmark(const std::string& patient_id, const TrustMatrix& y,
                                 const std::vector<BenchmarkFeature>& features,
                                 AffinityDenominator den = AffinityDenominator::Literal);

// Top n ∈ {3, 5, 10} doctors by affinity.
RecommendationList recommend_top_n(const AffinityVector& p, std::size_t n, ModelKind model);

// `recs_<model>_<n>.csv` rows: patient_id,rank,doctor_id,affinity.
void write_recommendations_csv(const std::string& path,
                               const std::vector<RecommendationList>& lists);

}  // namespace hyprec
