#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "hyprec/errors.hpp"
#include "hyprec/profiles.hpp"

using namespace hyprec;

namespace {

Date day(const char* iso) { return Date::parse(iso); }

// In-memory dataset: codes map to themselves and embed as given.
struct World {
    EmbeddingTable table;
    CodeMap map;
    InteractionLog log;

    void add_code(const std::string& code, std::vector<double> coords) {
        table.dim = coords.size();
        table.entries.emplace(code, PoincareVector{std::move(coords)});
        map.resolved.emplace(code, code);
    }
    void add_patient(const std::string& id, std::vector<std::string> codes,
                     const std::string& gender = "F", int birth_year = 1980,
                     const std::string& region = "north") {
        log.patients.push_back({id, gender, birth_year, region});
        for (const auto& c : codes) log.diagnoses.push_back({id, c, day("2023-01-01")});
    }
    void add_doctor(const std::string& id) { log.doctors.push_back({id, "F", 1970, "H1"}); }
    void add_visit(const std::string& pid, const std::string& did, const char* date) {
        log.visits.push_back({pid, did, day(date)});
    }
};

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::ConfigError;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("patient_feature averages the resolvable code multiset") {
    World w;
    w.add_code("100", {0.5, 0.0});
    w.add_code("200", {-0.5, 0.0});
    w.add_code("300", {0.0, 0.0});
    w.add_patient("P1", {"100"});
    w.add_patient("P2", {"100", "200"});
    w.add_patient("P3", {"100", "300"});

    CHECK(patient_feature("P1", w.log, w.map, w.table).feature.c[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(patient_feature("P2", w.log, w.map, w.table).feature.c[0] == doctest::Approx(0.0));
    const auto p3 = patient_feature("P3", w.log, w.map, w.table);
    CHECK(p3.feature.c[0] == doctest::Approx(0.2679491924311227).epsilon(1e-12));
    CHECK(p3.code_count == 2);

    CHECK(kind_of([&] { patient_feature("P9", w.log, w.map, w.table); }) == ErrorKind::UnknownPatient);
}

TEST_CASE("duplicate diagnoses re-weight the average") {
    World once;
    once.add_code("100", {0.5, 0.0});
    once.add_code("300", {0.0, 0.0});
    once.add_patient("P1", {"100", "300"});

    World twice;
    twice.add_code("100", {0.5, 0.0});
    twice.add_code("300", {0.0, 0.0});
    twice.add_patient("P1", {"100", "100", "300"});

    const double a = patient_feature("P1", once.log, once.map, once.table).feature.c[0];
    const double b = patient_feature("P1", twice.log, twice.map, twice.table).feature.c[0];
    CHECK(b > a);  // the repeated code pulls the average towards itself
}

TEST_CASE("doctor_feature pools visitor codes once per patient") {
    World w;
    w.add_code("100", {0.5, 0.0});
    w.add_code("200", {-0.5, 0.0});
    w.add_patient("P1", {"100"});
    w.add_patient("P2", {"200"});
    w.add_doctor("D1");
    w.add_doctor("D2");
    w.add_doctor("D3");
    w.add_visit("P1", "D1", "2023-01-01");
    w.add_visit("P1", "D2", "2023-01-02");
    w.add_visit("P2", "D2", "2023-01-03");
    // P1 visits D3 three times; expertise must match a single visit.
    w.add_visit("P1", "D3", "2023-01-04");
    w.add_visit("P1", "D3", "2023-02-04");
    w.add_visit("P1", "D3", "2023-03-04");

    CHECK(doctor_feature("D1", w.log, w.map, w.table).feature.c[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(doctor_feature("D2", w.log, w.map, w.table).feature.c[0] == doctest::Approx(0.0));
    const auto d1 = doctor_feature("D1", w.log, w.map, w.table);
    const auto d3 = doctor_feature("D3", w.log, w.map, w.table);
    CHECK(d3.feature.c == d1.feature.c);
    CHECK(d3.source_code_count == 1);

    CHECK(kind_of([&] { doctor_feature("D9", w.log, w.map, w.table); }) == ErrorKind::UnknownDoctor);

    World lonely;
    lonely.add_code("100", {0.5, 0.0});
    lonely.add_patient("P1", {"100"});
    lonely.add_doctor("D1");
    CHECK(kind_of([&] { doctor_feature("D1", lonely.log, lonely.map, lonely.table); }) ==
          ErrorKind::EmptyExpertise);
}

TEST_CASE("build_doctor_profiles reports the excluded doctors") {
    World w;
    w.add_code("100", {0.5, 0.0});
    w.add_patient("P1", {"100"});
    w.add_doctor("D1");
    w.add_doctor("D2");
    w.add_visit("P1", "D1", "2023-01-01");

    std::vector<std::string> excluded;
    const auto profiles = build_doctor_profiles(w.log, w.map, w.table, &excluded);
    CHECK(profiles.size() == 1);
    CHECK(profiles[0].doctor_id == "D1");
    CHECK(excluded == std::vector<std::string>{"D2"});
}

TEST_CASE("trust weights: recency and frequency") {
    World w;
    w.add_code("100", {0.1, 0.0});
    w.add_patient("P1", {"100"});
    w.add_patient("P2", {"100"});
    w.add_doctor("D1");
    w.add_doctor("D2");
    w.add_visit("P1", "D1", "2023-12-31");  // on the reference date
    w.add_visit("P1", "D1", "2023-01-01");  // exactly tau days earlier, tau=364
    const Date ref = day("2023-12-31");

    const auto y = trust_weights(w.log, ref, 364.0);
    const auto r = *y.patient_row("P1");
    CHECK(y.values.at(r, *y.doctor_col("D1")) ==
          doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-15));
    CHECK(y.values.at(r, *y.doctor_col("D2")) == 0.0);
    CHECK(y.values.at(*y.patient_row("P2"), *y.doctor_col("D1")) == 0.0);

    // A single visit weighs less the older it is.
    World older;
    older.add_code("100", {0.1, 0.0});
    older.add_patient("P1", {"100"});
    older.add_doctor("D1");
    older.add_visit("P1", "D1", "2023-06-01");
    const auto y_old = trust_weights(older.log, ref, 364.0);
    World newer = older;
    newer.log.visits[0].date = day("2023-11-01");
    const auto y_new = trust_weights(newer.log, ref, 364.0);
    CHECK(y_new.values.at(0, 0) > y_old.values.at(0, 0));

    // Any extra visit strictly increases the weight.
    World more = older;
    more.add_visit("P1", "D1", "2022-03-15");
    const auto y_more = trust_weights(more.log, ref, 364.0);
    CHECK(y_more.values.at(0, 0) > y_old.values.at(0, 0));

    CHECK(kind_of([&] { trust_weights(w.log, ref, 0.0); }) == ErrorKind::ConfigError);
    CHECK(kind_of([&] { trust_weights(w.log, ref, -3.0); }) == ErrorKind::ConfigError);
    CHECK(kind_of([&] { trust_weights(w.log, day("2023-06-01"), 364.0); }) == ErrorKind::DateError);
}

TEST_CASE("trust accumulation ignores the row order of the visit log") {
    World w;
    w.add_code("100", {0.1, 0.0});
    w.add_patient("P1", {"100"});
    w.add_patient("P2", {"100"});
    w.add_doctor("D1");
    w.add_doctor("D2");
    const char* dates[] = {"2023-01-02", "2023-03-04", "2023-05-06", "2023-07-08", "2023-09-10"};
    for (const char* d : dates) {
        w.add_visit("P1", "D1", d);
        w.add_visit("P2", "D1", d);
        w.add_visit("P1", "D2", d);
    }
    const Date ref = day("2023-12-31");
    const auto base = trust_weights(w.log, ref, 100.0);

    World shuffled = w;
    std::reverse(shuffled.log.visits.begin(), shuffled.log.visits.end());
    const auto again = trust_weights(shuffled.log, ref, 100.0);
    CHECK(again.values == base.values);  // bit-identical
}

TEST_CASE("benchmark features: blocks, norms and orderings") {
    World w;
    w.add_code("100", {0.1, 0.0});
    w.add_code("200", {0.2, 0.0});
    w.add_patient("P1", {"100"}, "F", 1980, "north");
    w.add_patient("P2", {"100"}, "F", 1980, "north");  // identical twin of P1
    w.add_patient("P3", {"200"}, "M", 1980, "south");  // disjoint in every column
    const Date ref = day("2023-12-31");

    auto feats = benchmark_features(w.log, w.map, ref);
    REQUIRE(feats.size() == 3);
    CHECK(feats[0].patient_id == "P1");

    // Twins agree exactly; cosine 1 via equal vectors.
    CHECK(feats[0].vec == feats[1].vec);

    // Orthogonal demographics (same age -> scaled 0) and disjoint codes.
    CHECK(dot(feats[0].vec, feats[2].vec) == doctest::Approx(0.0));

    for (const auto& f : feats) {
        double demo = 0.0, icd = 0.0;
        for (std::size_t i = 0; i < f.demographic_len; ++i) demo += f.vec[i] * f.vec[i];
        for (std::size_t i = f.demographic_len; i < f.vec.size(); ++i) icd += f.vec[i] * f.vec[i];
        CHECK(std::abs(demo - 1.0) < 1e-12);
        CHECK(std::abs(icd - 1.0) < 1e-12);  // retained patients always carry a code
    }

    // Column ordering is data-derived, not input-order-derived.
    World r = w;
    std::reverse(r.log.patients.begin(), r.log.patients.end());
    std::reverse(r.log.diagnoses.begin(), r.log.diagnoses.end());
    auto feats2 = benchmark_features(r.log, r.map, ref);
    REQUIRE(feats2.size() == 3);
    for (std::size_t i = 0; i < feats.size(); ++i) {
        CHECK(feats2[i].patient_id == feats[i].patient_id);
        CHECK(feats2[i].vec == feats[i].vec);
    }
}

TEST_CASE("profile construction is deterministic") {
    World w;
    w.add_code("100", {0.3, 0.1});
    w.add_code("200", {-0.2, 0.4});
    w.add_code("300", {0.0, -0.5});
    w.add_patient("P1", {"100", "200", "300"});
    w.add_patient("P2", {"200", "300"});
    w.add_doctor("D1");
    w.add_visit("P1", "D1", "2023-01-01");
    w.add_visit("P2", "D1", "2023-02-01");

    const auto a = build_patient_profiles(w.log, w.map, w.table);
    World shuffled = w;
    std::reverse(shuffled.log.diagnoses.begin(), shuffled.log.diagnoses.end());
    std::reverse(shuffled.log.patients.begin(), shuffled.log.patients.end());
    const auto b = build_patient_profiles(shuffled.log, shuffled.map, shuffled.table);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].patient_id == b[i].patient_id);
        CHECK(a[i].feature.c == b[i].feature.c);  // bit-identical
    }

    const auto d1 = doctor_feature("D1", w.log, w.map, w.table);
    const auto d2 = doctor_feature("D1", shuffled.log, shuffled.map, shuffled.table);
    CHECK(d1.feature.c == d2.feature.c);
}
