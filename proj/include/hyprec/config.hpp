#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyprec/dates.hpp"
#include "hyprec/recsys.hpp"

namespace hyprec {

// Flat key = value run configuration. Unknown keys and invalid values are
// rejected up front; the canonical echo of every setting travels into each
// report so a run can be reproduced from its output.
struct RunConfig {
    std::string embeddings;
    std::string cui_snomed;
    std::string snomed_icd9;
    std::string patients;
    std::string doctors;
    std::string visits;
    std::string diagnoses;
    std::string out_dir = "out";

    double tau_days = 365.0;
    std::optional<Date> reference_date;  // empty: latest visit in the log used
    std::optional<Date> cutoff_date;     // empty: quantile cutoff
    double cutoff_quantile = 0.8;
    double clamp_eps = 1e-5;
    std::vector<std::size_t> top_ns = {3, 5, 10};
    std::vector<ModelKind> models = {ModelKind::ConventionalCB, ModelKind::PatientIcdSimilarity,
                                     ModelKind::DoctorIcdSimilarity};
    AffinityDenominator denominator = AffinityDenominator::Literal;
    std::uint64_t seed = 42;
    unsigned n_threads = 0;

    // Parses the file; relative paths are resolved against its directory.
    static RunConfig load(const std::string& path);

    // Applies one `key = value` assignment. Throws ConfigError on unknown
    // keys or invalid values.
    void set(const std::string& key, const std::string& value);

    // All seven data paths must be present before a pipeline command runs.
    void require_data_paths() const;

    std::map<std::string, std::string> echo() const;
};

}  // namespace hyprec
