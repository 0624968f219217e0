#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyprec/dates.hpp"
#include "hyprec/geometry.hpp"
#include "hyprec/ingest.hpp"

namespace hyprec {

// Hyperbolic feature of one patient: Einstein-midpoint average of the
// embeddings of every resolvable diagnosis (duplicates kept).
struct PatientProfile {
    std::string patient_id;
    PoincareVector feature;
    std::size_t code_count = 0;
};

// Hyperbolic feature of one doctor, averaged over the code multisets of all
// patients who visited them. Each visiting patient contributes their codes
// once, regardless of how many visits they made.
struct DoctorProfile {
    std::string doctor_id;
    PoincareVector feature;
    std::size_t source_code_count = 0;
};

// Trust-weighted interaction matrix: y_ij = sum over visits of
// exp(-age_in_days / tau_days). Zero iff the pair never interacted.
struct TrustMatrix {
    std::vector<std::string> patient_ids;
    std::vector<std::string> doctor_ids;
    DenseMatrix values;

    std::optional<std::size_t> patient_row(const std::string& id) const;
    std::optional<std::size_t> doctor_col(const std::string& id) const;
};

// Feature vector for the conventional cosine benchmark: an L2-normalized
// demographic block (scaled age, one-hot gender, one-hot region) concatenated
// with an L2-normalized multi-hot block over the resolved ICD-9 vocabulary.
struct BenchmarkFeature {
    std::string patient_id;
    std::vector<double> vec;
    std::size_t demographic_len = 0;  // prefix length of the demographic block
};

PatientProfile patient_feature(const std::string& patient_id, const InteractionLog& log,
                               const CodeMap& map, const EmbeddingTable& table);

DoctorProfile doctor_feature(const std::string& doctor_id, const InteractionLog& log,
                             const CodeMap& map, const EmbeddingTable& table);

// Profiles for every retained patient, ascending patient_id.
std::vector<PatientProfile> build_patient_profiles(const InteractionLog& log, const CodeMap& map,
                                                   const EmbeddingTable& table);

// Profiles for every doctor with at least one retained visiting patient,
// ascending doctor_id. Doctors without one are skipped and reported through
// `excluded` when given.
std::vector<DoctorProfile> build_doctor_profiles(const InteractionLog& log, const CodeMap& map,
                                                 const EmbeddingTable& table,
                                                 std::vector<std::string>* excluded = nullptr);

// Rows: retained patients ascending. Columns: `doctor_ids` when given,
// otherwise every doctor in the log, ascending. Visits are accumulated in
// (patient, doctor, date) order so the sums are reproducible.
TrustMatrix trust_weights(const InteractionLog& log, Date reference_date, double tau_days,
                          const std::vector<std::string>* doctor_ids = nullptr);

// Latest visit date in the log; the default trust reference.
std::optional<Date> max_visit_date(const InteractionLog& log);

// One feature per retained patient, ascending patient_id. Ages are taken at
// `reference_date` and min-max scaled over the cohort; categorical columns
// follow the sorted set of values present in the cohort.
std::vector<BenchmarkFeature> benchmark_features(const InteractionLog& log, const CodeMap& map,
                                                 Date reference_date);

// `profiles.tsv` dump: entity_id, kind ("patient"/"doctor"), coordinates.
void write_profiles_tsv(const std::string& path, const std::vector<PatientProfile>& patients,
                        const std::vector<DoctorProfile>& doctors);

}  // namespace hyprec
