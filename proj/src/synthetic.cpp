#include "dsrim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>

#include "json.hpp"

#include "dsrim/random.hpp"

namespace dsrim {

namespace {

constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "gl", "st"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};

class WordMaker {
  public:
    explicit WordMaker(Rng& rng) : m_rng(rng) {}

    std::string make()
    {
        for (;;) {
            std::string word;
            const std::size_t syllables = 2 + m_rng.below(2);
            for (std::size_t i = 0; i < syllables; ++i) {
                word += kOnsets[m_rng.below(std::size(kOnsets))];
                word += kVowels[m_rng.below(std::size(kVowels))];
            }
            if (m_rng.bernoulli(0.5)) {
                word += kOnsets[m_rng.below(12)];
            }
            if (m_used.insert(word).second) {
                return word;
            }
        }
    }

  private:
    Rng& m_rng;
    std::set<std::string> m_used;
};

/// Cumulative Zipf weights 1/(r+1)^s over n ranks.
std::vector<double> zipf_cdf(std::size_t n, double s)
{
    std::vector<double> cdf(n);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        total += 1.0 / std::pow(static_cast<double>(r + 1), s);
        cdf[r] = total;
    }
    for (auto& c : cdf) {
        c /= total;
    }
    return cdf;
}

std::size_t draw(const std::vector<double>& cdf, Rng& rng)
{
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::string padded(std::size_t value, int width)
{
    std::string s = std::to_string(value);
    return std::string(static_cast<std::size_t>(std::max<int>(0, width - static_cast<int>(s.size()))), '0') + s;
}

struct Subtopic {
    std::string id;
    std::string word;
    std::size_t topic = 0;
    std::vector<std::string> leaf_ids;
    std::vector<std::string> leaf_words;
};

}  // namespace

SyntheticFixture generate_fixture(const SyntheticConfig& config)
{
    if (config.topics == 0 || config.subtopics_per_topic == 0 || config.leaves_per_subtopic == 0 ||
        config.documents == 0 || config.min_doc_tokens == 0 || config.max_doc_tokens < config.min_doc_tokens) {
        throw ConfigError("synthetic collection needs non-zero topics, subtopics, leaves, documents and lengths");
    }
    Rng rng(config.seed);
    WordMaker words(rng);
    SyntheticFixture fx;

    const std::string root = "root";
    fx.nodes.emplace_back(root, words.make());
    std::vector<std::string> topic_ids;
    std::vector<std::string> topic_words;
    std::vector<Subtopic> subtopics;
    std::vector<std::string> all_leaves;
    std::map<std::string, std::string> label_of;
    for (std::size_t t = 0; t < config.topics; ++t) {
        const std::string tid = "t" + padded(t, 2);
        topic_ids.push_back(tid);
        topic_words.push_back(words.make());
        fx.nodes.emplace_back(tid, topic_words.back());
        fx.edges.push_back({tid, root, "IS-A"});
        for (std::size_t s = 0; s < config.subtopics_per_topic; ++s) {
            Subtopic sub;
            sub.id = tid + ".s" + padded(s, 2);
            sub.word = words.make();
            sub.topic = t;
            fx.nodes.emplace_back(sub.id, sub.word);
            fx.edges.push_back({sub.id, tid, "IS-A"});
            for (std::size_t l = 0; l < config.leaves_per_subtopic; ++l) {
                const std::string lid = sub.id + ".l" + padded(l, 2);
                sub.leaf_ids.push_back(lid);
                sub.leaf_words.push_back(words.make());
                fx.nodes.emplace_back(lid, sub.leaf_words.back());
                fx.edges.push_back({lid, sub.id, "IS-A"});
                all_leaves.push_back(lid);
            }
            subtopics.push_back(std::move(sub));
        }
    }
    for (const auto& [id, label] : fx.nodes) {
        label_of[id] = label;
    }

    // Leaf-to-leaf links of another relation; oriented by index so they never form a cycle.
    std::set<std::pair<std::size_t, std::size_t>> links;
    while (links.size() < config.cross_links && all_leaves.size() > 1) {
        std::size_t a = rng.below(all_leaves.size());
        std::size_t b = rng.below(all_leaves.size());
        if (a == b) {
            continue;
        }
        if (a > b) {
            std::swap(a, b);
        }
        if (links.emplace(a, b).second) {
            fx.edges.push_back({all_leaves[a], all_leaves[b], "RELATED-TO"});
        }
    }

    std::vector<std::string> background;
    for (std::size_t i = 0; i < config.background_words; ++i) {
        background.push_back(words.make());
    }
    const auto background_cdf = zipf_cdf(background.size(), 1.0);

    // The most frequent background words are generic objects outside every topic.
    const std::size_t generic = std::min(config.generic_objects, background.size());
    if (generic > 0) {
        fx.nodes.emplace_back("g", words.make());
        fx.edges.push_back({"g", root, "IS-A"});
        for (std::size_t i = 0; i < generic; ++i) {
            const std::string gid = "g.l" + padded(i, 2);
            fx.nodes.emplace_back(gid, background[i]);
            fx.edges.push_back({gid, "g", "IS-A"});
        }
    }
    const auto leaf_cdf = zipf_cdf(config.leaves_per_subtopic, 1.0);

    // Subtopic popularity is itself skewed so that frequent objects concentrate in a few subtopics.
    std::vector<std::size_t> popularity(subtopics.size());
    for (std::size_t i = 0; i < popularity.size(); ++i) {
        popularity[i] = i;
    }
    rng.shuffle(popularity);
    const auto subtopic_cdf = zipf_cdf(subtopics.size(), 0.6);

    std::map<std::string, std::string> word_to_object;
    for (const auto& [id, label] : fx.nodes) {
        word_to_object[label] = id;
    }

    auto leaf_word = [&](const Subtopic& s) { return s.leaf_words[draw(leaf_cdf, rng)]; };
    auto sibling = [&](std::size_t index) {
        const std::size_t topic = subtopics[index].topic;
        const std::size_t offset = 1 + rng.below(config.subtopics_per_topic > 1 ? config.subtopics_per_topic - 1 : 1);
        const std::size_t local = (index % config.subtopics_per_topic + offset) % config.subtopics_per_topic;
        return topic * config.subtopics_per_topic + local;
    };

    auto annotate = [&](const std::string& text_id, const std::vector<std::string>& tokens) {
        std::set<std::string> seen;
        for (const auto& token : tokens) {
            const auto it = word_to_object.find(token);
            if (it != word_to_object.end() && seen.insert(it->second).second) {
                fx.annotations.emplace_back(text_id, it->second);
            }
        }
    };
    auto join = [](const std::vector<std::string>& tokens) {
        std::string text;
        for (const auto& t : tokens) {
            text += (text.empty() ? "" : " ") + t;
        }
        return text;
    };

    std::map<std::size_t, std::vector<std::string>> primary_docs;
    std::map<std::size_t, std::vector<std::string>> secondary_docs;
    const int doc_width = static_cast<int>(std::to_string(config.documents).size()) + 1;
    for (std::size_t d = 0; d < config.documents; ++d) {
        const std::string id = "d" + padded(d, doc_width);
        const std::size_t primary = popularity[draw(subtopic_cdf, rng)];
        std::optional<std::size_t> secondary;
        if (rng.bernoulli(0.3)) {
            secondary = rng.bernoulli(0.5) && config.subtopics_per_topic > 1 ? sibling(primary)
                                                                            : rng.below(subtopics.size());
            if (*secondary == primary) {
                secondary.reset();
            }
        }
        primary_docs[primary].push_back(id);
        if (secondary) {
            secondary_docs[*secondary].push_back(id);
        }
        const Subtopic& p = subtopics[primary];
        const std::size_t length = config.min_doc_tokens + rng.below(config.max_doc_tokens - config.min_doc_tokens + 1);
        std::vector<std::string> tokens;
        for (std::size_t i = 0; i < length; ++i) {
            const double r = rng.uniform();
            if (r < 0.40) {
                tokens.push_back(leaf_word(p));
            } else if (r < 0.43) {
                tokens.push_back(p.word);
            } else if (r < 0.45) {
                tokens.push_back(topic_words[p.topic]);
            } else if (r < 0.59) {
                const std::size_t other = secondary ? *secondary : sibling(primary);
                tokens.push_back(leaf_word(subtopics[other]));
            } else if (r < 0.64) {
                tokens.push_back(label_of[all_leaves[rng.below(all_leaves.size())]]);
            } else {
                tokens.push_back(background[draw(background_cdf, rng)]);
            }
        }
        fx.documents[id] = join(tokens);
        fx.subtopic_of[id] = p.id;
        annotate(id, tokens);
    }

    // Queries target distinct subtopics that have enough primary documents.
    std::vector<std::size_t> eligible;
    for (const auto& [s, docs] : primary_docs) {
        if (docs.size() >= 3) {
            eligible.push_back(s);
        }
    }
    eligible = rng.sample(eligible, config.queries);
    std::sort(eligible.begin(), eligible.end());
    const int query_width = static_cast<int>(std::to_string(config.queries).size()) + 1;
    std::vector<std::string> doc_ids;
    for (const auto& [id, text] : fx.documents) {
        doc_ids.push_back(id);
    }
    for (std::size_t q = 0; q < eligible.size(); ++q) {
        const std::string id = "q" + padded(q, query_width);
        const Subtopic& s = subtopics[eligible[q]];
        std::vector<std::string> tokens;
        std::set<std::string> used;
        const std::size_t length = 2 + rng.below(3);
        for (std::size_t guard = 0; tokens.size() < length && guard < 100; ++guard) {
            const std::string w = leaf_word(s);
            if (used.insert(w).second) {
                tokens.push_back(w);
            }
        }
        if (rng.bernoulli(0.5)) {
            tokens.push_back(s.word);
        }
        // A common word and often the broad topic word, so that BM25 candidates go well beyond the subtopic.
        tokens.push_back(background[rng.below(std::min<std::size_t>(5, background.size()))]);
        if (rng.bernoulli(0.5)) {
            tokens.push_back(topic_words[s.topic]);
        }
        fx.queries[id] = join(tokens);
        fx.subtopic_of[id] = s.id;
        annotate(id, tokens);

        std::set<std::string> judged;
        for (const auto& d : primary_docs[eligible[q]]) {
            fx.qrels.add(id, d, 2);
            judged.insert(d);
        }
        for (const auto& d : secondary_docs[eligible[q]]) {
            if (judged.insert(d).second) {
                fx.qrels.add(id, d, 1);
            }
        }
        std::vector<std::string> near;
        std::vector<std::string> far;
        for (const auto& d : doc_ids) {
            if (judged.count(d) != 0) {
                continue;
            }
            const std::string& sub = fx.subtopic_of[d];
            (sub.compare(0, 3, s.id, 0, 3) == 0 ? near : far).push_back(d);
        }
        const std::size_t half = config.judged_negatives / 2;
        for (const auto& d : rng.sample(near, half)) {
            fx.qrels.add(id, d, 0);
        }
        for (const auto& d : rng.sample(far, config.judged_negatives - half)) {
            fx.qrels.add(id, d, 0);
        }
    }
    return fx;
}

void write_fixture(const SyntheticFixture& fixture, const std::filesystem::path& directory)
{
    std::filesystem::create_directories(directory);
    auto open = [&](const char* name) {
        std::ofstream out(directory / name, std::ios::binary);
        if (!out) {
            throw Error("cannot write " + (directory / name).string());
        }
        return out;
    };
    {
        auto out = open("nodes.tsv");
        out << "# id\tlabel\n";
        for (const auto& [id, label] : fixture.nodes) {
            out << id << '\t' << label << '\n';
        }
    }
    {
        auto out = open("edges.tsv");
        out << "# child\tparent\trelation\n";
        for (const auto& e : fixture.edges) {
            out << e.child << '\t' << e.parent << '\t' << e.relation << '\n';
        }
    }
    auto write_texts = [&](const char* name, const std::map<std::string, std::string>& texts) {
        auto out = open(name);
        for (const auto& [id, text] : texts) {
            out << nlohmann::json{{"id", id}, {"text", text}}.dump() << '\n';
        }
    };
    write_texts("documents.jsonl", fixture.documents);
    write_texts("queries.jsonl", fixture.queries);
    {
        auto out = open("annotations.tsv");
        for (const auto& [text, object] : fixture.annotations) {
            out << text << '\t' << object << '\n';
        }
    }
    {
        auto out = open("qrels.txt");
        save_qrels(out, fixture.qrels);
    }
}

}  // namespace dsrim
