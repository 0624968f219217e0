#include "hyprec/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "hyprec/errors.hpp"

namespace hyprec {

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    return in;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(field);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
        throw Error(ErrorKind::ParseError, where + ": bad number '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& where) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw Error(ErrorKind::ParseError, where + ": bad integer '" + s + "'");
    return v;
}

std::string loc(const std::string& path, std::size_t lineno) {
    return path + ":" + std::to_string(lineno);
}

// Reads a comma-delimited file with a mandatory header row; calls row_fn with
// the fields of each data row.
template <typename Fn>
void for_each_csv_row(const std::string& path, std::size_t n_cols, Fn&& row_fn) {
    auto in = open_or_throw(path);
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;  // header content is not interpreted
            continue;
        }
        auto fields = split(line, ',');
        if (fields.size() != n_cols)
            throw Error(ErrorKind::ParseError, loc(path, lineno) + ": expected " +
                                                   std::to_string(n_cols) + " fields, got " +
                                                   std::to_string(fields.size()));
        row_fn(fields, lineno);
    }
    if (!header_seen) throw Error(ErrorKind::ParseError, path + ": missing header row");
}

}  // namespace

bool is_valid_icd9(const std::string& code) {
    std::size_t i = 0;
    std::size_t lead_digits = 3;
    if (i < code.size() && (code[i] == 'V' || code[i] == 'E')) {
        if (code[i] == 'V') lead_digits = 2;
        ++i;
    }
    for (std::size_t k = 0; k < lead_digits; ++k, ++i)
        if (i >= code.size() || !std::isdigit(static_cast<unsigned char>(code[i]))) return false;
    if (i == code.size()) return true;
    if (code[i] != '.') return false;
    ++i;
    const std::size_t sub = code.size() - i;
    if (sub < 1 || sub > 2) return false;
    for (; i < code.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(code[i]))) return false;
    return true;
}

EmbeddingTable load_embeddings(const std::string& path, IngestReport& report, double clamp_eps) {
    auto in = open_or_throw(path);
    EmbeddingTable table;
    std::string line;
    std::size_t lineno = 0;
    std::size_t declared_dim = 0;

    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        if (line.rfind("#dim=", 0) == 0) {
            if (lineno != 1)
                throw Error(ErrorKind::ParseError, loc(path, lineno) + ": #dim= allowed on line 1 only");
            declared_dim = static_cast<std::size_t>(parse_int(line.substr(5), loc(path, lineno)));
            if (declared_dim == 0)
                throw Error(ErrorKind::ParseError, loc(path, lineno) + ": #dim= must be positive");
            continue;
        }
        auto fields = split(line, '\t');
        if (fields.size() < 2)
            throw Error(ErrorKind::ParseError, loc(path, lineno) + ": expected code + coordinates");
        const std::string& code = fields[0];
        const std::size_t dim = fields.size() - 1;
        if (declared_dim == 0 && table.dim == 0) table.dim = dim;
        if (declared_dim != 0) table.dim = declared_dim;
        if (dim != table.dim)
            throw Error(ErrorKind::ParseError, loc(path, lineno) + ": inconsistent dimension " +
                                                   std::to_string(dim) + " (expected " +
                                                   std::to_string(table.dim) + ")");
        PoincareVector v;
        v.c.reserve(dim);
        for (std::size_t i = 1; i < fields.size(); ++i)
            v.c.push_back(parse_double(fields[i], loc(path, lineno)));

        ++report.embedding_rows;
        auto it = table.entries.find(code);
        if (it != table.entries.end()) {
            // Re-clamp the candidate the same way before comparing.
            PoincareVector w = v;
            clamp_to_ball(w.c, clamp_eps);
            if (w.c != it->second.c)
                throw Error(ErrorKind::DuplicateCode,
                            loc(path, lineno) + ": code '" + code + "' repeated with a different vector");
            ++report.embedding_duplicate_rows;
            continue;
        }
        if (clamp_to_ball(v.c, clamp_eps)) ++report.embeddings_clamped;
        table.entries.emplace(code, std::move(v));
    }
    report.embedding_dim = table.dim;
    return table;
}

CodeMap build_code_map(const std::string& cui_snomed_path, const std::string& snomed_icd9_path,
                       const EmbeddingTable& table, IngestReport& report) {
    CodeMap map;
    std::unordered_map<std::string, std::vector<std::string>> snomed_to_cuis;
    for_each_csv_row(cui_snomed_path, 2, [&](const std::vector<std::string>& f, std::size_t) {
        map.cui_to_snomed.emplace(f[0], f[1]);
        snomed_to_cuis[f[1]].push_back(f[0]);
        ++report.cui_snomed_rows;
    });

    std::map<std::string, std::set<std::string>> icd9_to_cuis;
    for_each_csv_row(snomed_icd9_path, 2, [&](const std::vector<std::string>& f, std::size_t) {
        map.snomed_to_icd9.emplace(f[0], f[1]);
        ++report.snomed_icd9_rows;
        auto it = snomed_to_cuis.find(f[0]);
        if (it == snomed_to_cuis.end()) return;
        for (const auto& cui : it->second)
            if (table.find(cui) != nullptr) icd9_to_cuis[f[1]].insert(cui);
    });

    std::set<std::string> all_icd9;
    for (const auto& [snomed, icd9] : map.snomed_to_icd9) all_icd9.insert(icd9);

    for (const auto& icd9 : all_icd9) {
        auto it = icd9_to_cuis.find(icd9);
        if (it == icd9_to_cuis.end() || it->second.empty()) {
            ++map.unresolved_codes;
            continue;
        }
        if (it->second.size() > 1) ++map.ambiguous_codes;
        map.resolved.emplace(icd9, *it->second.begin());  // lexicographically smallest CUI
    }
    report.codes_resolved = map.resolved.size();
    report.codes_ambiguous = map.ambiguous_codes;
    report.codes_unresolved = map.unresolved_codes;
    return map;
}

const PoincareVector* resolve_code(const std::string& icd9, const CodeMap& map,
                                   const EmbeddingTable& table) {
    auto it = map.resolved.find(icd9);
    if (it == map.resolved.end()) return nullptr;
    return table.find(it->second);
}

InteractionLog load_interactions(const std::string& patients_path, const std::string& doctors_path,
                                 const std::string& visits_path, const std::string& diagnoses_path,
                                 const CodeMap& map, IngestReport& report) {
    std::vector<PatientRecord> patients;
    std::unordered_set<std::string> patient_ids;
    for_each_csv_row(patients_path, 4, [&](const std::vector<std::string>& f, std::size_t lineno) {
        if (!patient_ids.insert(f[0]).second)
            throw Error(ErrorKind::IntegrityError,
                        loc(patients_path, lineno) + ": duplicate patient_id '" + f[0] + "'");
        patients.push_back({f[0], f[1], parse_int(f[2], loc(patients_path, lineno)), f[3]});
    });

    InteractionLog log;
    std::unordered_set<std::string> doctor_ids;
    for_each_csv_row(doctors_path, 4, [&](const std::vector<std::string>& f, std::size_t lineno) {
        if (!doctor_ids.insert(f[0]).second)
            throw Error(ErrorKind::IntegrityError,
                        loc(doctors_path, lineno) + ": duplicate doctor_id '" + f[0] + "'");
        log.doctors.push_back({f[0], f[1], parse_int(f[2], loc(doctors_path, lineno)), f[3]});
    });

    std::vector<VisitRecord> visits;
    for_each_csv_row(visits_path, 3, [&](const std::vector<std::string>& f, std::size_t lineno) {
        if (!patient_ids.count(f[0]))
            throw Error(ErrorKind::IntegrityError,
                        loc(visits_path, lineno) + ": visit references unknown patient '" + f[0] + "'");
        if (!doctor_ids.count(f[1]))
            throw Error(ErrorKind::IntegrityError,
                        loc(visits_path, lineno) + ": visit references unknown doctor '" + f[1] + "'");
        visits.push_back({f[0], f[1], Date::parse(f[2])});
    });

    std::vector<DiagnosisRecord> diagnoses;
    std::unordered_set<std::string> resolvable_patients;
    for_each_csv_row(diagnoses_path, 3, [&](const std::vector<std::string>& f, std::size_t lineno) {
        if (!patient_ids.count(f[0]))
            throw Error(ErrorKind::IntegrityError,
                        loc(diagnoses_path, lineno) + ": diagnosis references unknown patient '" + f[0] + "'");
        if (!is_valid_icd9(f[1]))
            throw Error(ErrorKind::ParseError,
                        loc(diagnoses_path, lineno) + ": invalid ICD-9 code '" + f[1] + "'");
        diagnoses.push_back({f[0], f[1], Date::parse(f[2])});
        if (map.resolved.count(f[1])) {
            resolvable_patients.insert(f[0]);
            ++report.diagnoses_resolvable;
        }
    });

    report.patients_total = patients.size();
    report.doctors_total = log.doctors.size();
    report.visits_total = visits.size();
    report.diagnoses_total = diagnoses.size();

    for (auto& p : patients)
        if (resolvable_patients.count(p.patient_id)) log.patients.push_back(std::move(p));
    for (auto& v : visits)
        if (resolvable_patients.count(v.patient_id)) log.visits.push_back(std::move(v));
    for (auto& d : diagnoses)
        if (resolvable_patients.count(d.patient_id)) log.diagnoses.push_back(std::move(d));

    report.patients_retained = log.patients.size();
    report.patients_dropped = report.patients_total - report.patients_retained;
    report.visits_retained = log.visits.size();
    report.diagnoses_retained = log.diagnoses.size();
    return log;
}

std::string IngestReport::to_json(const std::map<std::string, std::string>& config_echo) const {
    nlohmann::ordered_json j;
    j["embeddings"] = {{"rows", embedding_rows},
                       {"dim", embedding_dim},
                       {"clamped", embeddings_clamped},
                       {"duplicate_rows", embedding_duplicate_rows}};
    j["code_map"] = {{"cui_snomed_rows", cui_snomed_rows},
                     {"snomed_icd9_rows", snomed_icd9_rows},
                     {"resolved", codes_resolved},
                     {"ambiguous", codes_ambiguous},
                     {"unresolved", codes_unresolved}};
    j["interactions"] = {{"patients_total", patients_total},
                         {"patients_retained", patients_retained},
                         {"patients_dropped", patients_dropped},
                         {"doctors_total", doctors_total},
                         {"visits_total", visits_total},
                         {"visits_retained", visits_retained},
                         {"diagnoses_total", diagnoses_total},
                         {"diagnoses_retained", diagnoses_retained},
                         {"diagnoses_resolvable", diagnoses_resolvable}};
    if (!config_echo.empty()) {
        j["config"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : config_echo) j["config"][k] = v;
    }
    return j.dump(2) + "\n";
}

}  // namespace hyprec
