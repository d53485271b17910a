#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dsrim/corpus.hpp"
#include "dsrim/kgraph.hpp"

namespace dsrim {

/// Shape of a generated test collection: a single-root taxonomy
/// (root -> topics -> subtopics -> leaves) whose labels are the words
/// documents and queries are written in.
struct SyntheticConfig {
    std::size_t topics = 8;
    std::size_t subtopics_per_topic = 5;
    std::size_t leaves_per_subtopic = 9;
    std::size_t documents = 300;
    std::size_t queries = 30;
    std::size_t min_doc_tokens = 30;
    std::size_t max_doc_tokens = 60;
    std::size_t background_words = 150;
    /// The most frequent background words also exist as objects under a generic branch.
    std::size_t generic_objects = 30;
    /// Cross links between leaves with a relation other than IS-A.
    std::size_t cross_links = 25;
    /// Grade-0 judgments per query: half from sibling subtopics, half from elsewhere.
    std::size_t judged_negatives = 10;
    std::uint64_t seed = 1;
};

struct SyntheticFixture {
    std::vector<std::pair<std::string, std::string>> nodes;  // id, label
    std::vector<Edge> edges;
    std::map<std::string, std::string> documents;  // id -> text
    std::map<std::string, std::string> queries;
    std::vector<std::pair<std::string, std::string>> annotations;  // text id, object id
    Qrels qrels;
    /// Primary subtopic node of every document and query.
    std::map<std::string, std::string> subtopic_of;
};

SyntheticFixture generate_fixture(const SyntheticConfig& config);

/// Writes nodes.tsv, edges.tsv, documents.jsonl, queries.jsonl, annotations.tsv and qrels.txt.
void write_fixture(const SyntheticFixture& fixture, const std::filesystem::path& directory);

}  // namespace dsrim
