#include "hyprec/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "hyprec/errors.hpp"

namespace hyprec {

namespace {

// Sorted multiset of a patient's resolvable diagnosis codes.
std::vector<std::string> resolvable_codes(const std::string& patient_id, const InteractionLog& log,
                                          const CodeMap& map) {
    std::vector<std::string> codes;
    for (const auto& d : log.diagnoses)
        if (d.patient_id == patient_id && map.resolved.count(d.icd9_code))
            codes.push_back(d.icd9_code);
    std::sort(codes.begin(), codes.end());
    return codes;
}

PoincareVector average_codes(const std::vector<std::string>& codes, const CodeMap& map,
                             const EmbeddingTable& table) {
    std::vector<PoincareVector> pts;
    pts.reserve(codes.size());
    for (const auto& code : codes) {
        const PoincareVector* v = resolve_code(code, map, table);
        if (v != nullptr) pts.push_back(*v);
    }
    return hyperbolic_average(pts);
}

bool has_patient(const InteractionLog& log, const std::string& id) {
    return std::any_of(log.patients.begin(), log.patients.end(),
                       [&](const PatientRecord& p) { return p.patient_id == id; });
}

void normalize_block(std::vector<double>& v, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i] * v[i];
    if (s <= 0.0) return;
    const double inv = 1.0 / std::sqrt(s);
    for (std::size_t i = lo; i < hi; ++i) v[i] *= inv;
}

}  // namespace

std::optional<std::size_t> TrustMatrix::patient_row(const std::string& id) const {
    auto it = std::lower_bound(patient_ids.begin(), patient_ids.end(), id);
    if (it == patient_ids.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - patient_ids.begin());
}

std::optional<std::size_t> TrustMatrix::doctor_col(const std::string& id) const {
    auto it = std::lower_bound(doctor_ids.begin(), doctor_ids.end(), id);
    if (it == doctor_ids.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - doctor_ids.begin());
}

PatientProfile patient_feature(const std::string& patient_id, const InteractionLog& log,
                               const CodeMap& map, const EmbeddingTable& table) {
    if (!has_patient(log, patient_id))
        throw Error(ErrorKind::UnknownPatient, "patient '" + patient_id + "' not in the retained log");
    auto codes = resolvable_codes(patient_id, log, map);
    PatientProfile profile;
    profile.patient_id = patient_id;
    profile.code_count = codes.size();
    profile.feature = average_codes(codes, map, table);
    return profile;
}

DoctorProfile doctor_feature(const std::string& doctor_id, const InteractionLog& log,
                             const CodeMap& map, const EmbeddingTable& table) {
    const bool known = std::any_of(log.doctors.begin(), log.doctors.end(),
                                   [&](const DoctorRecord& d) { return d.doctor_id == doctor_id; });
    if (!known)
        throw Error(ErrorKind::UnknownDoctor, "doctor '" + doctor_id + "' not in the log");

    std::set<std::string> visitors;
    for (const auto& v : log.visits)
        if (v.doctor_id == doctor_id) visitors.insert(v.patient_id);

    // Multiset union over visiting patients, each patient's codes once.
    std::vector<std::string> codes;
    for (const auto& pid : visitors) {
        auto pc = resolvable_codes(pid, log, map);
        codes.insert(codes.end(), pc.begin(), pc.end());
    }
    if (codes.empty())
        throw Error(ErrorKind::EmptyExpertise, "doctor '" + doctor_id + "' has no retained visitors");

    std::sort(codes.begin(), codes.end());
    DoctorProfile profile;
    profile.doctor_id = doctor_id;
    profile.source_code_count = codes.size();
    profile.feature = average_codes(codes, map, table);
    return profile;
}

std::vector<PatientProfile> build_patient_profiles(const InteractionLog& log, const CodeMap& map,
                                                   const EmbeddingTable& table) {
    std::vector<std::string> ids;
    ids.reserve(log.patients.size());
    for (const auto& p : log.patients) ids.push_back(p.patient_id);
    std::sort(ids.begin(), ids.end());

    // Group diagnoses once instead of scanning per patient.
    std::unordered_map<std::string, std::vector<std::string>> codes_by_patient;
    for (const auto& d : log.diagnoses)
        if (map.resolved.count(d.icd9_code)) codes_by_patient[d.patient_id].push_back(d.icd9_code);

    std::vector<PatientProfile> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        auto& codes = codes_by_patient[id];
        std::sort(codes.begin(), codes.end());
        PatientProfile profile;
        profile.patient_id = id;
        profile.code_count = codes.size();
        profile.feature = average_codes(codes, map, table);
        out.push_back(std::move(profile));
    }
    return out;
}

std::vector<DoctorProfile> build_doctor_profiles(const InteractionLog& log, const CodeMap& map,
                                                 const EmbeddingTable& table,
                                                 std::vector<std::string>* excluded) {
    std::unordered_map<std::string, std::set<std::string>> visitors;
    for (const auto& v : log.visits) visitors[v.doctor_id].insert(v.patient_id);

    std::unordered_map<std::string, std::vector<std::string>> codes_by_patient;
    for (const auto& d : log.diagnoses)
        if (map.resolved.count(d.icd9_code)) codes_by_patient[d.patient_id].push_back(d.icd9_code);
    for (auto& [pid, codes] : codes_by_patient) std::sort(codes.begin(), codes.end());

    std::vector<std::string> ids;
    ids.reserve(log.doctors.size());
    for (const auto& d : log.doctors) ids.push_back(d.doctor_id);
    std::sort(ids.begin(), ids.end());

    std::vector<DoctorProfile> out;
    for (const auto& id : ids) {
        std::vector<std::string> codes;
        auto it = visitors.find(id);
        if (it != visitors.end())
            for (const auto& pid : it->second) {
                const auto& pc = codes_by_patient[pid];
                codes.insert(codes.end(), pc.begin(), pc.end());
            }
        if (codes.empty()) {
            if (excluded != nullptr) excluded->push_back(id);
            continue;
        }
        std::sort(codes.begin(), codes.end());
        DoctorProfile profile;
        profile.doctor_id = id;
        profile.source_code_count = codes.size();
        profile.feature = average_codes(codes, map, table);
        out.push_back(std::move(profile));
    }
    return out;
}

std::optional<Date> max_visit_date(const InteractionLog& log) {
    std::optional<Date> latest;
    for (const auto& v : log.visits)
        if (!latest || v.date > *latest) latest = v.date;
    return latest;
}

TrustMatrix trust_weights(const InteractionLog& log, Date reference_date, double tau_days,
                          const std::vector<std::string>* doctor_ids) {
    if (!(tau_days > 0.0) || !std::isfinite(tau_days))
        throw Error(ErrorKind::ConfigError, "tau_days must be positive");

    TrustMatrix trust;
    for (const auto& p : log.patients) trust.patient_ids.push_back(p.patient_id);
    std::sort(trust.patient_ids.begin(), trust.patient_ids.end());
    if (doctor_ids != nullptr) {
        trust.doctor_ids = *doctor_ids;
        std::sort(trust.doctor_ids.begin(), trust.doctor_ids.end());
    } else {
        for (const auto& d : log.doctors) trust.doctor_ids.push_back(d.doctor_id);
        std::sort(trust.doctor_ids.begin(), trust.doctor_ids.end());
    }
    trust.values = DenseMatrix(trust.patient_ids.size(), trust.doctor_ids.size(), 0.0);

    std::vector<const VisitRecord*> visits;
    visits.reserve(log.visits.size());
    for (const auto& v : log.visits) visits.push_back(&v);
    std::stable_sort(visits.begin(), visits.end(), [](const VisitRecord* a, const VisitRecord* b) {
        if (a->patient_id != b->patient_id) return a->patient_id < b->patient_id;
        if (a->doctor_id != b->doctor_id) return a->doctor_id < b->doctor_id;
        return a->date < b->date;
    });

    for (const VisitRecord* v : visits) {
        if (v->date > reference_date)
            throw Error(ErrorKind::DateError, "visit of '" + v->patient_id + "' on " + v->date.iso() +
                                                  " is after the reference date " + reference_date.iso());
        auto row = trust.patient_row(v->patient_id);
        auto col = trust.doctor_col(v->doctor_id);
        if (!row || !col) continue;  // doctor outside the requested axis
        const double age_days = static_cast<double>(days_between(v->date, reference_date));
        trust.values.at(*row, *col) += std::exp(-age_days / tau_days);
    }
    return trust;
}

std::vector<BenchmarkFeature> benchmark_features(const InteractionLog& log, const CodeMap& map,
                                                 Date reference_date) {
    std::vector<const PatientRecord*> patients;
    for (const auto& p : log.patients) patients.push_back(&p);
    std::sort(patients.begin(), patients.end(),
              [](const PatientRecord* a, const PatientRecord* b) { return a->patient_id < b->patient_id; });

    std::set<std::string> genders, regions, vocab;
    for (const auto* p : patients) {
        genders.insert(p->gender);
        regions.insert(p->region);
    }
    std::unordered_map<std::string, std::set<std::string>> codes_by_patient;
    for (const auto& d : log.diagnoses)
        if (map.resolved.count(d.icd9_code)) {
            vocab.insert(d.icd9_code);
            codes_by_patient[d.patient_id].insert(d.icd9_code);
        }

    const int ref_year = reference_date.year();
    int min_age = 0, max_age = 0;
    bool first = true;
    for (const auto* p : patients) {
        const int age = ref_year - p->birth_year;
        min_age = first ? age : std::min(min_age, age);
        max_age = first ? age : std::max(max_age, age);
        first = false;
    }
    const int age_range = max_age - min_age;

    std::vector<std::string> gender_cols(genders.begin(), genders.end());
    std::vector<std::string> region_cols(regions.begin(), regions.end());
    std::vector<std::string> code_cols(vocab.begin(), vocab.end());
    const std::size_t demo_len = 1 + gender_cols.size() + region_cols.size();

    std::vector<BenchmarkFeature> out;
    out.reserve(patients.size());
    for (const auto* p : patients) {
        BenchmarkFeature f;
        f.patient_id = p->patient_id;
        f.demographic_len = demo_len;
        f.vec.assign(demo_len + code_cols.size(), 0.0);

        const int age = ref_year - p->birth_year;
        f.vec[0] = age_range > 0 ? static_cast<double>(age - min_age) / age_range : 0.0;
        std::size_t off = 1;
        for (std::size_t i = 0; i < gender_cols.size(); ++i)
            if (gender_cols[i] == p->gender) f.vec[off + i] = 1.0;
        off += gender_cols.size();
        for (std::size_t i = 0; i < region_cols.size(); ++i)
            if (region_cols[i] == p->region) f.vec[off + i] = 1.0;
        off += region_cols.size();

        const auto& codes = codes_by_patient[p->patient_id];
        for (std::size_t i = 0; i < code_cols.size(); ++i)
            if (codes.count(code_cols[i])) f.vec[off + i] = 1.0;

        normalize_block(f.vec, 0, demo_len);
        normalize_block(f.vec, demo_len, f.vec.size());
        out.push_back(std::move(f));
    }
    return out;
}

void write_profiles_tsv(const std::string& path, const std::vector<PatientProfile>& patients,
                        const std::vector<DoctorProfile>& doctors) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + path + "'");
    char buf[32];
    auto write_row = [&](const std::string& id, const char* kind, const PoincareVector& v) {
        out << id << '\t' << kind;
        for (double x : v.c) {
            std::snprintf(buf, sizeof(buf), "%.17g", x);
            out << '\t' << buf;
        }
        out << '\n';
    };
    for (const auto& p : patients) write_row(p.patient_id, "patient", p.feature);
    for (const auto& d : doctors) write_row(d.doctor_id, "doctor", d.feature);
}

}  // namespace hyprec
