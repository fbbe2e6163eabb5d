#include "cigmatch/keygraph.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace cigmatch::keygraph {

std::vector<std::string> KeyGraph::neighbors(const std::string& v) const {
    std::vector<std::string> out;
    for (const auto& [edge, count] : edges) {
        if (edge.first == v) out.push_back(edge.second);
        else if (edge.second == v) out.push_back(edge.first);
    }
    return out;
}

std::vector<std::pair<std::string, double>> textrank_keywords(
    const textprep::Document& doc, const TextRankParams& params) {
    // Co-occurrence graph over sliding windows, stopwords removed.
    std::set<std::string> vertices;
    std::set<Edge> edges;
    for (const auto& sentence : doc.sentences) {
        std::vector<std::string> words;
        for (const auto& tok : sentence) {
            if (!textprep::is_stopword(tok)) words.push_back(tok);
        }
        for (std::size_t i = 0; i < words.size(); ++i) {
            vertices.insert(words[i]);
            for (std::size_t j = i + 1; j < words.size() && j < i + static_cast<std::size_t>(params.window); ++j) {
                if (words[i] != words[j]) edges.insert(make_edge(words[i], words[j]));
            }
        }
    }
    if (vertices.empty()) return {};

    std::unordered_map<std::string, std::vector<std::string>> adj;
    for (const auto& e : edges) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }

    std::unordered_map<std::string, double> score;
    for (const auto& v : vertices) score[v] = 1.0;
    const double d = params.damping;
    for (int iter = 0; iter < params.max_iters; ++iter) {
        std::unordered_map<std::string, double> next;
        double max_delta = 0.0;
        for (const auto& v : vertices) {
            double sum = 0.0;
            auto it = adj.find(v);
            if (it != adj.end()) {
                for (const auto& u : it->second) {
                    sum += score[u] / static_cast<double>(adj[u].size());
                }
            }
            double s = (1.0 - d) + d * sum;
            max_delta = std::max(max_delta, std::abs(s - score[v]));
            next[v] = s;
        }
        score = std::move(next);
        if (max_delta < params.epsilon) break;
    }

    std::vector<std::pair<std::string, double>> ranked(score.begin(), score.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (static_cast<int>(ranked.size()) > params.top_k) ranked.resize(params.top_k);
    return ranked;
}

KeyGraph build_keygraph(const std::set<std::string>& keywords,
                        const std::vector<std::vector<std::string>>& sentences) {
    KeyGraph g;
    for (const auto& sentence : sentences) {
        std::set<std::string> present;
        for (const auto& tok : sentence) {
            if (keywords.count(tok)) present.insert(tok);
        }
        for (const auto& k : present) g.vertices.insert(k);
        for (auto it = present.begin(); it != present.end(); ++it) {
            auto jt = it;
            for (++jt; jt != present.end(); ++jt) {
                ++g.edges[make_edge(*it, *jt)];
            }
        }
    }
    return g;
}

namespace {

// Brandes' algorithm; accumulating over all sources counts each unordered
// pair twice, so halve at the end.
std::map<Edge, double> brandes_edge_betweenness(
    const std::vector<std::string>& vertices,
    const std::unordered_map<std::string, std::vector<std::string>>& adj) {
    std::map<Edge, double> score;
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < vertices.size(); ++i) index[vertices[i]] = static_cast<int>(i);
    const int n = static_cast<int>(vertices.size());

    for (int s = 0; s < n; ++s) {
        std::vector<int> dist(n, -1);
        std::vector<double> sigma(n, 0.0);
        std::vector<std::vector<int>> preds(n);
        std::vector<int> order;
        std::deque<int> queue;
        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s);
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            order.push_back(v);
            auto it = adj.find(vertices[v]);
            if (it == adj.end()) continue;
            for (const auto& wname : it->second) {
                int w = index.at(wname);
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        std::vector<double> delta(n, 0.0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int w = *it;
            for (int v : preds[w]) {
                double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                score[make_edge(vertices[v], vertices[w])] += c;
                delta[v] += c;
            }
        }
    }
    for (auto& [e, v] : score) v *= 0.5;
    return score;
}

struct Component {
    std::vector<std::string> vertices;
    std::unordered_map<std::string, std::vector<std::string>> adj;
};

std::vector<Component> connected_components(
    const std::vector<std::string>& vertices,
    const std::unordered_map<std::string, std::vector<std::string>>& adj) {
    std::set<std::string> unvisited(vertices.begin(), vertices.end());
    std::vector<Component> out;
    while (!unvisited.empty()) {
        std::deque<std::string> queue{*unvisited.begin()};
        unvisited.erase(unvisited.begin());
        Component comp;
        while (!queue.empty()) {
            std::string v = queue.front();
            queue.pop_front();
            comp.vertices.push_back(v);
            auto it = adj.find(v);
            if (it == adj.end()) continue;
            for (const auto& u : it->second) {
                if (unvisited.erase(u)) queue.push_back(u);
            }
        }
        std::sort(comp.vertices.begin(), comp.vertices.end());
        std::set<std::string> members(comp.vertices.begin(), comp.vertices.end());
        for (const auto& v : comp.vertices) {
            auto it = adj.find(v);
            if (it == adj.end()) continue;
            for (const auto& u : it->second) {
                if (members.count(u)) comp.adj[v].push_back(u);
            }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

}  // namespace

std::map<Edge, double> edge_betweenness(const KeyGraph& g) {
    std::vector<std::string> vertices(g.vertices.begin(), g.vertices.end());
    std::unordered_map<std::string, std::vector<std::string>> adj;
    for (const auto& [e, count] : g.edges) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }
    auto score = brandes_edge_betweenness(vertices, adj);
    for (const auto& [e, count] : g.edges) score.try_emplace(e, 0.0);
    return score;
}

std::vector<Concept> detect_communities(const KeyGraph& g, int min_size, int max_size) {
    std::vector<std::string> vertices(g.vertices.begin(), g.vertices.end());
    std::unordered_map<std::string, std::vector<std::string>> adj;
    for (const auto& [e, count] : g.edges) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }

    std::vector<Concept> out;
    std::deque<Component> work;
    for (auto& comp : connected_components(vertices, adj)) work.push_back(std::move(comp));

    while (!work.empty()) {
        Component comp = std::move(work.front());
        work.pop_front();
        int size = static_cast<int>(comp.vertices.size());
        if (size <= max_size) {
            if (size >= min_size) {
                Concept c;
                c.keywords.insert(comp.vertices.begin(), comp.vertices.end());
                out.push_back(std::move(c));
            } else {
                for (const auto& v : comp.vertices) {
                    Concept c;
                    c.keywords.insert(v);
                    out.push_back(std::move(c));
                }
            }
            continue;
        }
        // Oversized: remove the highest-betweenness edge and re-split.
        auto bt = brandes_edge_betweenness(comp.vertices, comp.adj);
        Edge best;
        double best_score = -1.0;
        for (const auto& [e, s] : bt) {
            if (s > best_score || (s == best_score && e < best)) {
                best = e;
                best_score = s;
            }
        }
        auto& an = comp.adj[best.first];
        an.erase(std::find(an.begin(), an.end(), best.second));
        auto& bn = comp.adj[best.second];
        bn.erase(std::find(bn.begin(), bn.end(), best.first));
        for (auto& sub : connected_components(comp.vertices, comp.adj)) work.push_back(std::move(sub));
    }

    std::sort(out.begin(), out.end(), [](const Concept& a, const Concept& b) {
        return *a.keywords.begin() < *b.keywords.begin();
    });
    return out;
}

}  // namespace cigmatch::keygraph
