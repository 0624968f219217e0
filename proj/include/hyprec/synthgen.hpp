#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyprec/dates.hpp"
#include "hyprec/ingest.hpp"

namespace hyprec {

// Complete b-ary code hierarchy in BFS order; node 0 is the root.
struct CodeTree {
    struct Node {
        std::string code;
        int parent = -1;  // -1 for the root
        int depth = 0;
    };
    std::vector<Node> nodes;
    int branching = 0;
    int depth = 0;

    // Edge count of the unique path between two nodes.
    int tree_distance(std::size_t a, std::size_t b) const;
    std::vector<std::size_t> leaves() const;
};

struct SynthParams {
    std::uint64_t seed = 42;
    int branching = 4;
    int depth = 4;
    std::size_t n_patients = 1000;
    std::size_t n_doctors = 50;
    int visits_per_patient = 8;
    int codes_per_patient = 3;
    double affinity_sharpness = 4.0;   // 0 makes the doctor choice uniform
    double radius_step = 1.0;          // hyperbolic radius per tree level
    Date start_date = Date::parse("2022-01-01");
    int window_days = 730;             // visit/diagnosis dates fall in this window

    void validate() const;  // throws ConfigError
};

// Complete b-ary tree with (b^(depth+1) - 1)/(b - 1) nodes. Codes are
// ICD-9-shaped identifiers assigned in BFS order.
CodeTree generate_hierarchy(const SynthParams& params);

// Radial 2-d layout: the root sits at the origin, a node at tree depth l at
// hyperbolic radius l * radius_step (Euclidean tanh(l*step/2)), with its
// angle at the centre of the sector obtained by recursively splitting the
// parent's sector among the siblings.
EmbeddingTable layout_tree_embeddings(const CodeTree& tree, const SynthParams& params);

// Simulates the population and writes the complete ingest file set
// (embeddings.tsv, the two identity mapping CSVs, patients/doctors/visits/
// diagnoses CSVs), a ground_truth.json with the doctor anchors and patient
// branches, and a ready-to-run config.ini. Every draw comes from one seeded
// generator in a fixed order, so equal seeds give byte-identical files.
// Doctors get a uniformly random anchor leaf; each patient draws codes from
// a random depth-2 branch and picks each visit's doctor with probability
// proportional to exp(-affinity_sharpness * d_H(patient feature, anchor)).
void simulate_population(const CodeTree& tree, const EmbeddingTable& table,
                         const SynthParams& params, const std::string& out_dir);

}  // namespace hyprec
