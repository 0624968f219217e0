#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hyprec/dates.hpp"
#include "hyprec/geometry.hpp"

namespace hyprec {

// Disease-code -> Poincare embedding lookup. Keys are the code identifiers
// of whatever vocabulary the embeddings were trained on (CUIs for the UMLS
// tables, raw codes for synthetic data).
struct EmbeddingTable {
    std::size_t dim = 0;
    std::map<std::string, PoincareVector> entries;

    const PoincareVector* find(const std::string& code) const {
        auto it = entries.find(code);
        return it == entries.end() ? nullptr : &it->second;
    }
};

// Two-stage terminology bridge: ICD-9 -> SNOMED -> CUI. `resolved` holds the
// unique winning CUI per ICD-9 code (lexicographically smallest among the
// candidates that actually have an embedding).
struct CodeMap {
    std::multimap<std::string, std::string> cui_to_snomed;
    std::multimap<std::string, std::string> snomed_to_icd9;
    std::map<std::string, std::string> resolved;  // icd9 -> cui

    std::size_t ambiguous_codes = 0;   // resolved through the tie-break
    std::size_t unresolved_codes = 0;  // no chain ends at an embedded CUI
};

struct PatientRecord {
    std::string patient_id;
    std::string gender;
    int birth_year = 0;
    std::string region;

    bool operator==(const PatientRecord&) const = default;
};

struct DoctorRecord {
    std::string doctor_id;
    std::string gender;
    int birth_year = 0;
    std::string hospital;

    bool operator==(const DoctorRecord&) const = default;
};

struct VisitRecord {
    std::string patient_id;
    std::string doctor_id;
    Date date;

    bool operator==(const VisitRecord&) const = default;
};

struct DiagnosisRecord {
    std::string patient_id;
    std::string icd9_code;
    Date date;

    bool operator==(const DiagnosisRecord&) const = default;
};

// Loaded, referentially consistent dataset. Patients without a single
// resolvable ICD-9 diagnosis are dropped together with their visits and
// diagnoses; everything here is immutable after loading.
struct InteractionLog {
    std::vector<PatientRecord> patients;  // retained patients only
    std::vector<DoctorRecord> doctors;
    std::vector<VisitRecord> visits;          // visits of retained patients
    std::vector<DiagnosisRecord> diagnoses;   // diagnoses of retained patients
};

// Row/drop/ambiguity accounting across all loaders, emitted as JSON.
struct IngestReport {
    std::size_t embedding_rows = 0;
    std::size_t embedding_dim = 0;
    std::size_t embeddings_clamped = 0;
    std::size_t embedding_duplicate_rows = 0;  // identical repeats, kept once

    std::size_t cui_snomed_rows = 0;
    std::size_t snomed_icd9_rows = 0;
    std::size_t codes_resolved = 0;
    std::size_t codes_ambiguous = 0;
    std::size_t codes_unresolved = 0;

    std::size_t patients_total = 0;
    std::size_t patients_retained = 0;
    std::size_t patients_dropped = 0;
    std::size_t doctors_total = 0;
    std::size_t visits_total = 0;
    std::size_t visits_retained = 0;
    std::size_t diagnoses_total = 0;
    std::size_t diagnoses_retained = 0;
    std::size_t diagnoses_resolvable = 0;

    // `config_echo`, when present, is embedded for provenance.
    std::string to_json(const std::map<std::string, std::string>& config_echo = {}) const;
};

// `code<TAB>v1<TAB>...<TAB>vd` rows, optional leading `#dim=<d>` header.
// Vectors are clamped into the ball on load (clamps counted in the report).
EmbeddingTable load_embeddings(const std::string& path, IngestReport& report,
                               double clamp_eps = kClampEps);

// Both inputs are two-column CSVs with a header row. Resolves every ICD-9
// code reachable through icd9 -> snomed -> cui with cui present in `table`.
CodeMap build_code_map(const std::string& cui_snomed_path, const std::string& snomed_icd9_path,
                       const EmbeddingTable& table, IngestReport& report);

// Embedding for an ICD-9 code, or nullptr when the code is not mapped.
const PoincareVector* resolve_code(const std::string& icd9, const CodeMap& map,
                                   const EmbeddingTable& table);

// True when `code` is syntactically an ICD-9 code: three digits (two after a
// V prefix) plus an optional 1-2 digit decimal subcode.
bool is_valid_icd9(const std::string& code);

// Loads the four record CSVs, checks referential integrity, applies the
// resolvable-diagnosis patient filter.
InteractionLog load_interactions(const std::string& patients_path, const std::string& doctors_path,
                                 const std::string& visits_path, const std::string& diagnoses_path,
                                 const CodeMap& map, IngestReport& report);

}  // namespace hyprec
