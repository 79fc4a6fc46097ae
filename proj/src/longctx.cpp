#include "curator/longctx.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>
#include <regex>
#include <set>
#include <unordered_map>

#include "curator/errors.hpp"
#include "curator/hashing.hpp"
#include "curator/language.hpp"
#include "curator/rng.hpp"

namespace curator::pack {

namespace {

std::string dirname(const std::string& path) {
    const auto slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string{} : path.substr(0, slash);
}

std::string join_path(const std::string& dir, const std::string& rel) { return dir.empty() ? rel : dir + "/" + rel; }

// Collapses "." and ".." components; returns empty when escaping the root.
std::string normalize(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto slash = path.find('/', start);
        if (slash == std::string::npos) slash = path.size();
        const std::string part = path.substr(start, slash - start);
        if (part == "..") {
            if (parts.empty()) return {};
            parts.pop_back();
        } else if (!part.empty() && part != ".") {
            parts.push_back(part);
        }
        start = slash + 1;
    }
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += '/';
        out += parts[i];
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r()");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r()");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string_view::npos) comma = s.size();
        auto item = trim(s.substr(start, comma - start));
        if (auto as = item.find(" as "); as != std::string::npos) item = trim(item.substr(0, as));
        if (!item.empty()) out.push_back(item);
        start = comma + 1;
    }
    return out;
}

bool ends_with_component(const std::string& path, const std::string& suffix) {
    if (path == suffix) return true;
    return path.size() > suffix.size() && path.ends_with(suffix) && path[path.size() - suffix.size() - 1] == '/';
}

class Resolution {
public:
    explicit Resolution(std::span<const SourceFile> files) {
        for (const auto& f : files) paths_.insert(f.path);
    }

    bool has(const std::string& p) const { return !p.empty() && paths_.contains(p); }

    std::vector<std::string> resolve(Resolver kind, const std::string& importer, const std::string& target) const {
        switch (kind) {
            case Resolver::PythonModule: return python(importer, target);
            case Resolver::Include: return include(importer, target);
            case Resolver::JavaClass: return java(target);
            case Resolver::JsRelative: return js(importer, target);
        }
        return {};
    }

private:
    std::set<std::string> paths_;

    std::optional<std::string> python_module(const std::string& importer, const std::string& module) const {
        std::size_t dots = 0;
        while (dots < module.size() && module[dots] == '.') ++dots;
        std::string rest = module.substr(dots);
        std::replace(rest.begin(), rest.end(), '.', '/');
        std::vector<std::string> candidates;
        if (dots > 0) {
            std::string base = dirname(importer);
            for (std::size_t k = 1; k < dots; ++k) base = dirname(base);
            if (rest.empty()) {
                candidates.push_back(join_path(base, "__init__.py"));
            } else {
                candidates.push_back(join_path(base, rest + ".py"));
                candidates.push_back(join_path(base, rest + "/__init__.py"));
            }
        } else if (!rest.empty()) {
            const std::string dir = dirname(importer);
            candidates.push_back(join_path(dir, rest + ".py"));
            candidates.push_back(join_path(dir, rest + "/__init__.py"));
            candidates.push_back(rest + ".py");
            candidates.push_back(rest + "/__init__.py");
        }
        for (const auto& c : candidates) {
            if (has(c)) return c;
        }
        return std::nullopt;
    }

    std::vector<std::string> python(const std::string& importer, const std::string& target) const {
        std::vector<std::string> out;
        const auto pos = target.find(" import ");
        if (pos == std::string::npos) {
            for (const auto& m : split_list(target)) {
                if (auto r = python_module(importer, m)) out.push_back(*r);
            }
            return out;
        }
        const std::string module = trim(target.substr(0, pos));
        bool found_submodule = false;
        for (const auto& name : split_list(target.substr(pos + 8))) {
            if (name == "*") continue;
            const std::string sub = module.back() == '.' ? module + name : module + "." + name;
            if (auto r = python_module(importer, sub)) {
                out.push_back(*r);
                found_submodule = true;
            }
        }
        if (!found_submodule) {
            if (auto r = python_module(importer, module)) out.push_back(*r);
        }
        return out;
    }

    std::vector<std::string> include(const std::string& importer, const std::string& target) const {
        for (const auto& c : {normalize(join_path(dirname(importer), target)), normalize(target)}) {
            if (has(c)) return {c};
        }
        const std::string needle = normalize(target);
        if (needle.empty()) return {};
        std::string match;
        for (const auto& p : paths_) {
            if (ends_with_component(p, needle)) {
                if (!match.empty()) return {};  // ambiguous
                match = p;
            }
        }
        return match.empty() ? std::vector<std::string>{} : std::vector<std::string>{match};
    }

    std::vector<std::string> java(const std::string& target) const {
        std::string t = target;
        std::vector<std::string> out;
        if (t.ends_with(".*")) {
            std::string dir = t.substr(0, t.size() - 2);
            std::replace(dir.begin(), dir.end(), '.', '/');
            for (const auto& p : paths_) {
                if (p.ends_with(".java") && ends_with_component(dirname(p), dir)) out.push_back(p);
            }
            return out;
        }
        // static imports name a member; retry without the last component
        for (int attempt = 0; attempt < 2 && !t.empty(); ++attempt) {
            std::string rel = t;
            std::replace(rel.begin(), rel.end(), '.', '/');
            rel += ".java";
            std::string match;
            bool ambiguous = false;
            for (const auto& p : paths_) {
                if (ends_with_component(p, rel)) {
                    ambiguous = !match.empty();
                    match = p;
                }
            }
            if (!match.empty() && !ambiguous) return {match};
            const auto dot = t.find_last_of('.');
            if (dot == std::string::npos) break;
            t = t.substr(0, dot);
        }
        return out;
    }

    std::vector<std::string> js(const std::string& importer, const std::string& target) const {
        if (!target.starts_with(".")) return {};
        const std::string base = normalize(join_path(dirname(importer), target));
        if (base.empty()) return {};
        for (const char* ext : {"", ".js", ".ts", ".jsx", ".tsx", ".mjs", "/index.js", "/index.ts"}) {
            if (has(base + ext)) return {base + ext};
        }
        return {};
    }
};

std::string language_family(const std::string& language) {
    if (language == "C" || language == "C++" || language == "CUDA") return "C";
    if (language == "JavaScript" || language == "TypeScript") return "JavaScript";
    return language;
}

Resolver resolver_from_name(const std::string& name) {
    if (name == "python") return Resolver::PythonModule;
    if (name == "include") return Resolver::Include;
    if (name == "java") return Resolver::JavaClass;
    if (name == "js") return Resolver::JsRelative;
    throw ConfigError("unknown import resolver: " + name);
}

// Graph over a node subset addressed by position in DepGraph::nodes.
struct IndexedGraph {
    std::vector<std::string> names;
    std::vector<std::vector<std::uint32_t>> out;  // importer -> imported
    std::vector<std::vector<std::uint32_t>> und;  // undirected, with multiplicity

    IndexedGraph(const DepGraph& g, std::span<const std::string> subset) {
        names.assign(subset.begin(), subset.end());
        std::sort(names.begin(), names.end());
        std::unordered_map<std::string, std::uint32_t> index;
        for (std::uint32_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
        out.resize(names.size());
        und.resize(names.size());
        for (const auto& [from, to] : g.edges) {
            auto a = index.find(from);
            auto b = index.find(to);
            if (a == index.end() || b == index.end()) continue;
            out[a->second].push_back(b->second);
            und[a->second].push_back(b->second);
            und[b->second].push_back(a->second);
        }
    }

    std::size_t size() const { return names.size(); }
};

// Tarjan's algorithm, iterative. Returns component id per node.
std::vector<std::uint32_t> strongly_connected(const IndexedGraph& g, std::uint32_t& count) {
    const std::uint32_t n = static_cast<std::uint32_t>(g.size());
    constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::vector<std::pair<std::uint32_t, std::size_t>> call;
    std::uint32_t next = 0;
    count = 0;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        call.emplace_back(root, 0);
        while (!call.empty()) {
            auto& [v, edge] = call.back();
            if (edge == 0 && index[v] == kUnvisited) {
                index[v] = low[v] = next++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (edge < g.out[v].size()) {
                const std::uint32_t w = g.out[v][edge++];
                if (index[w] == kUnvisited) {
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
            const std::uint32_t done = v;
            call.pop_back();
            if (!call.empty()) {
                const std::uint32_t parent = call.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }
    return comp;
}

std::vector<std::vector<std::uint32_t>> weak_components(const IndexedGraph& g, const std::vector<std::uint32_t>& members) {
    std::vector<char> in(g.size(), 0), seen(g.size(), 0);
    for (auto m : members) in[m] = 1;
    std::vector<std::vector<std::uint32_t>> out;
    for (auto start : members) {
        if (seen[start]) continue;
        std::vector<std::uint32_t> comp;
        std::deque<std::uint32_t> queue{start};
        seen[start] = 1;
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop_front();
            comp.push_back(v);
            for (auto w : g.und[v]) {
                if (in[w] && !seen[w]) {
                    seen[w] = 1;
                    queue.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t size_of(const std::map<std::string, std::size_t>& sizes, const std::string& node) {
    auto it = sizes.find(node);
    if (it == sizes.end()) throw ConfigError("no size for node " + node);
    return it->second;
}

}  // namespace

void DepGraph::validate() const {
    const std::set<std::string> known(nodes.begin(), nodes.end());
    for (const auto& [from, to] : edges) {
        if (from == to) throw ConfigError("self edge on " + from);
        if (!known.contains(from) || !known.contains(to)) throw ConfigError("edge references unknown node: " + from + " -> " + to);
    }
}

ImportRules ImportRules::defaults() {
    ImportRules r;
    const std::vector<ImportRule> python = {
        {R"re(^\s*import\s+([\w\.]+(?:\s+as\s+\w+)?(?:\s*,\s*[\w\.]+(?:\s+as\s+\w+)?)*))re", 1, Resolver::PythonModule},
        {R"re(^\s*from\s+(\.*[\w\.]*\s+import\s+.+)$)re", 1, Resolver::PythonModule},
    };
    const std::vector<ImportRule> c_like = {{R"re(^\s*#\s*include\s*"([^"]+)")re", 1, Resolver::Include}};
    const std::vector<ImportRule> java = {{R"re(^\s*import\s+(?:static\s+)?([\w\.]+(?:\.\*)?)\s*;)re", 1, Resolver::JavaClass}};
    const std::vector<ImportRule> js = {
        {R"re(^\s*import\s+(?:[^'"]*?\s+from\s+)?['"]([^'"]+)['"])re", 1, Resolver::JsRelative},
        {R"re(^\s*export\s+[^'"]*?\s+from\s+['"]([^'"]+)['"])re", 1, Resolver::JsRelative},
        {R"re(require\(\s*['"]([^'"]+)['"]\s*\))re", 1, Resolver::JsRelative},
    };
    r.add({"Python", python});
    r.add({"C", c_like});
    r.add({"C++", c_like});
    r.add({"CUDA", c_like});
    r.add({"Java", java});
    r.add({"JavaScript", js});
    r.add({"TypeScript", js});
    return r;
}

void ImportRules::add(ImportRuleSet set) {
    for (const auto& rule : set.rules) {
        try {
            std::regex check(rule.pattern);
            if (rule.group < 0 || static_cast<unsigned>(rule.group) > check.mark_count())
                throw ConfigError("import rule group out of range: " + rule.pattern);
        } catch (const std::regex_error& e) {
            throw ConfigError("bad import pattern " + rule.pattern + ": " + e.what());
        }
    }
    std::string language = set.language;
    sets_[language] = std::move(set);
}

void ImportRules::add_from_json(const Json& j) {
    ImportRuleSet set;
    set.language = j.at("language").get<std::string>();
    for (const auto& r : j.at("rules")) {
        set.rules.push_back({r.at("pattern").get<std::string>(), r.value("group", 1),
                             resolver_from_name(r.value("resolver", std::string("include")))});
    }
    add(std::move(set));
}

const ImportRuleSet* ImportRules::find(const std::string& language) const {
    auto it = sets_.find(language);
    return it == sets_.end() ? nullptr : &it->second;
}

DepGraph extract_deps(std::span<const SourceFile> files, const std::string& language, const ImportRules& rules) {
    const ImportRuleSet* set = rules.find(language);
    if (!set) throw ConfigError("no import rules for " + language + "; use random packing");

    std::vector<std::pair<std::regex, const ImportRule*>> compiled;
    for (const auto& rule : set->rules) compiled.emplace_back(std::regex(rule.pattern, std::regex::optimize), &rule);

    DepGraph g;
    g.language = language;
    std::set<std::string> nodes;
    for (const auto& f : files) nodes.insert(f.path);
    g.nodes.assign(nodes.begin(), nodes.end());

    const Resolution resolution(files);
    const std::string family = language_family(language);
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& f : files) {
        if (language_family(infer_language(f.path)) != family) continue;
        std::size_t pos = 0;
        while (pos < f.content.size()) {
            auto end = f.content.find('\n', pos);
            if (end == std::string::npos) end = f.content.size();
            const std::string line = f.content.substr(pos, end - pos);
            pos = end + 1;
            if (line.size() > 2000) continue;
            for (const auto& [re, rule] : compiled) {
                std::smatch m;
                if (!std::regex_search(line, m, re)) continue;
                for (const auto& target : resolution.resolve(rule->resolver, f.path, m[rule->group].str())) {
                    if (target != f.path) edges.emplace(f.path, target);
                }
            }
        }
    }
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

std::string file_header(const std::string& path, const std::string& language) {
    static const std::set<std::string> hash = {"Python", "Shell", "Ruby", "Perl", "R", "Julia", "YAML", "Makefile",
                                               "CMake", "Dockerfile", "Elixir", "PowerShell", "Tcl", "Tcsh", "AWK"};
    static const std::set<std::string> dash = {"SQL", "Haskell", "Lua", "Ada", "VHDL", "Elm", "Idris"};
    static const std::set<std::string> markup = {"HTML", "XSLT", "Markdown"};
    static const std::set<std::string> percent = {"TeX", "MATLAB", "Prolog", "Erlang"};
    static const std::set<std::string> semi = {"Common Lisp", "Emacs Lisp", "Scheme", "Racket", "Clojure", "Assembly"};
    if (hash.contains(language)) return "# " + path;
    if (dash.contains(language)) return "-- " + path;
    if (markup.contains(language)) return "<!-- " + path + " -->";
    if (percent.contains(language)) return "% " + path;
    if (semi.contains(language)) return "; " + path;
    return "// " + path;
}

std::string file_block(const SourceFile& file, const std::string& language) {
    std::string out = file_header(file.path, language);
    out += '\n';
    out += file.content;
    if (!file.content.empty() && file.content.back() != '\n') out += '\n';
    return out;
}

std::vector<std::string> topo_order(const DepGraph& graph) {
    const IndexedGraph g(graph, graph.nodes);
    std::uint32_t ncomp = 0;
    const auto comp = strongly_connected(g, ncomp);

    std::vector<std::vector<std::uint32_t>> members(ncomp);
    for (std::uint32_t v = 0; v < g.size(); ++v) members[comp[v]].push_back(v);  // ascending = path order
    std::vector<std::set<std::uint32_t>> dependents(ncomp);
    std::vector<std::size_t> pending(ncomp, 0);
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        for (auto w : g.out[v]) {
            if (comp[v] != comp[w] && dependents[comp[w]].insert(comp[v]).second) ++pending[comp[v]];
        }
    }
    using Item = std::pair<std::uint32_t, std::uint32_t>;  // (smallest member, component)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
    for (std::uint32_t c = 0; c < ncomp; ++c) {
        if (pending[c] == 0) ready.emplace(members[c].front(), c);
    }
    std::vector<std::string> order;
    order.reserve(g.size());
    while (!ready.empty()) {
        const auto c = ready.top().second;
        ready.pop();
        for (auto v : members[c]) order.push_back(g.names[v]);
        for (auto d : dependents[c]) {
            if (--pending[d] == 0) ready.emplace(members[d].front(), d);
        }
    }
    return order;
}

Cut best_cut(const DepGraph& graph, std::span<const std::string> nodes, const std::map<std::string, std::size_t>& sizes,
             std::size_t cap) {
    const IndexedGraph g(graph, nodes);
    const std::size_t n = g.size();
    Cut best;
    if (n < 2) return best;
    std::vector<std::size_t> size(n);
    for (std::size_t i = 0; i < n; ++i) size[i] = size_of(sizes, g.names[i]);

    bool found = false;
    std::size_t best_crossing = 0;
    std::size_t best_size = 0;
    auto better = [&](std::size_t crossing, std::size_t part_size) {
        return !found || crossing < best_crossing || (crossing == best_crossing && part_size > best_size);
    };

    if (n <= 16) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (std::uint32_t v = 0; v < n; ++v) {
            for (auto w : g.out[v]) edges.emplace_back(v, w);
        }
        std::uint32_t best_mask = 0;
        const std::uint32_t full = (1u << n) - 1;
        for (std::uint32_t mask = 1; mask < full; ++mask) {
            std::size_t s = 0;
            for (std::uint32_t bits = mask; bits; bits &= bits - 1) s += size[std::countr_zero(bits)];
            if (s > cap) continue;
            std::size_t crossing = 0;
            for (auto [a, b] : edges) crossing += ((mask >> a) & 1u) != ((mask >> b) & 1u);
            if (better(crossing, s)) {
                found = true;
                best_crossing = crossing;
                best_size = s;
                best_mask = mask;
            }
        }
        if (!found) return best;
        for (std::uint32_t i = 0; i < n; ++i) {
            if ((best_mask >> i) & 1u) best.part.push_back(g.names[i]);
        }
    } else {
        const std::size_t seeds = n <= 64 ? n : 8;
        std::vector<std::uint32_t> best_part;
        for (std::size_t s = 0; s < seeds; ++s) {
            const auto seed = static_cast<std::uint32_t>(s * n / seeds);
            if (size[seed] > cap) continue;
            std::vector<char> in(n, 0);
            std::vector<long> conn(n, 0);
            std::vector<std::uint32_t> part;
            std::size_t part_size = 0;
            long crossing = 0;
            auto add = [&](std::uint32_t v) {
                crossing += static_cast<long>(g.und[v].size()) - 2 * conn[v];
                in[v] = 1;
                part.push_back(v);
                part_size += size[v];
                for (auto w : g.und[v]) ++conn[w];
            };
            add(seed);
            while (part.size() < n) {
                if (better(static_cast<std::size_t>(crossing), part_size)) {
                    found = true;
                    best_crossing = static_cast<std::size_t>(crossing);
                    best_size = part_size;
                    best_part = part;
                }
                long best_delta = std::numeric_limits<long>::max();
                std::uint32_t pick = 0;
                bool any = false;
                for (std::uint32_t v = 0; v < n; ++v) {
                    if (in[v] || part_size + size[v] > cap) continue;
                    const long delta = static_cast<long>(g.und[v].size()) - 2 * conn[v];
                    if (delta < best_delta) {
                        best_delta = delta;
                        pick = v;
                        any = true;
                    }
                }
                if (!any || part.size() + 1 == n) break;
                add(pick);
            }
        }
        if (!found) return best;
        std::sort(best_part.begin(), best_part.end());
        for (auto v : best_part) best.part.push_back(g.names[v]);
    }
    best.crossing = best_crossing;
    best.part_size = best_size;
    return best;
}

std::vector<Subgraph> decompose_oversize(const DepGraph& graph, const std::map<std::string, std::size_t>& sizes,
                                         std::size_t cap) {
    if (cap == 0) throw ConfigError("cap must be positive");
    std::vector<Subgraph> out;
    if (graph.nodes.empty()) return out;
    const IndexedGraph g(graph, graph.nodes);

    std::vector<std::uint32_t> regular;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        const std::size_t s = size_of(sizes, g.names[v]);
        if (s > cap) {
            out.push_back({{g.names[v]}, s, true});
        } else {
            regular.push_back(v);
        }
    }

    auto total = [&](const std::vector<std::uint32_t>& vs) {
        std::size_t s = 0;
        for (auto v : vs) s += size_of(sizes, g.names[v]);
        return s;
    };

    std::vector<std::vector<std::uint32_t>> pieces;
    std::deque<std::vector<std::uint32_t>> queue;
    for (auto& c : weak_components(g, regular)) queue.push_back(std::move(c));
    while (!queue.empty()) {
        auto comp = std::move(queue.front());
        queue.pop_front();
        if (total(comp) <= cap) {
            pieces.push_back(std::move(comp));
            continue;
        }
        std::vector<std::string> names;
        for (auto v : comp) names.push_back(g.names[v]);
        const Cut cut = best_cut(graph, names, sizes, cap);
        const std::set<std::string> part(cut.part.begin(), cut.part.end());
        std::vector<std::uint32_t> taken, rest;
        for (auto v : comp) (part.contains(g.names[v]) ? taken : rest).push_back(v);
        pieces.push_back(std::move(taken));
        for (auto& c : weak_components(g, rest)) queue.push_back(std::move(c));
    }

    std::sort(pieces.begin(), pieces.end(), [&](const auto& a, const auto& b) {
        const auto sa = total(a), sb = total(b);
        if (sa != sb) return sa > sb;
        return a.front() < b.front();
    });
    std::vector<std::vector<std::uint32_t>> bins;
    std::vector<std::size_t> fill;
    for (const auto& p : pieces) {
        const std::size_t s = total(p);
        std::size_t b = 0;
        while (b < bins.size() && fill[b] + s > cap) ++b;
        if (b == bins.size()) {
            bins.emplace_back();
            fill.push_back(0);
        }
        bins[b].insert(bins[b].end(), p.begin(), p.end());
        fill[b] += s;
    }
    for (std::size_t b = 0; b < bins.size(); ++b) {
        std::sort(bins[b].begin(), bins[b].end());
        Subgraph sg;
        for (auto v : bins[b]) sg.nodes.push_back(g.names[v]);
        sg.size = fill[b];
        out.push_back(std::move(sg));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.nodes.front() < b.nodes.front(); });
    return out;
}

namespace {

PackedSequence assemble(const std::string& repo_id, const std::vector<std::string>& order,
                        const std::map<std::string, const SourceFile*>& by_path, const std::string& language) {
    PackedSequence seq;
    seq.repo_id = repo_id;
    for (const auto& p : order) {
        const SourceFile& f = *by_path.at(p);
        seq.text += file_block(f, language.empty() ? infer_language(f.path) : language);
        seq.files.push_back(p);
    }
    seq.token_estimate = estimate_tokens(seq.text.size());
    return seq;
}

}  // namespace

std::vector<PackedSequence> topo_pack(const DepGraph& graph, const std::string& repo_id,
                                      std::span<const SourceFile> files, std::size_t cap) {
    graph.validate();
    std::map<std::string, const SourceFile*> by_path;
    for (const auto& f : files) by_path[f.path] = &f;
    for (const auto& n : graph.nodes) {
        if (!by_path.contains(n)) throw ConfigError("graph node without file: " + n);
    }
    if (by_path.size() != graph.nodes.size()) throw ConfigError("graph does not cover every repository file");
    if (graph.nodes.empty()) return {};

    std::map<std::string, std::size_t> sizes;
    std::size_t total = 0;
    for (const auto& [path, f] : by_path) {
        sizes[path] = estimate_tokens(file_block(*f, infer_language(path)).size());
        total += sizes[path];
    }
    std::vector<Subgraph> parts;
    if (total <= cap) {
        parts.push_back({graph.nodes, total, false});
    } else {
        parts = decompose_oversize(graph, sizes, cap);
    }

    std::vector<PackedSequence> out;
    for (const auto& part : parts) {
        DepGraph sub;
        sub.language = graph.language;
        sub.nodes = part.nodes;
        const std::set<std::string> members(part.nodes.begin(), part.nodes.end());
        for (const auto& e : graph.edges) {
            if (members.contains(e.first) && members.contains(e.second)) sub.edges.push_back(e);
        }
        auto seq = assemble(repo_id, topo_order(sub), by_path, {});
        seq.oversize = part.oversize;
        out.push_back(std::move(seq));
    }
    return out;
}

std::vector<PackedSequence> random_pack(const std::string& repo_id, std::span<const SourceFile> files,
                                        const std::string& language, std::uint64_t seed, std::size_t cap) {
    if (cap == 0) throw ConfigError("cap must be positive");
    std::vector<const SourceFile*> order;
    for (const auto& f : files) order.push_back(&f);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->path < b->path; });
    Rng rng(derive_seed(seed, repo_id));
    rng.shuffle(order);

    std::vector<PackedSequence> out;
    PackedSequence current;
    std::size_t used = 0;
    auto flush = [&] {
        if (current.files.empty()) return;
        current.repo_id = repo_id;
        current.token_estimate = estimate_tokens(current.text.size());
        out.push_back(std::move(current));
        current = {};
        used = 0;
    };
    for (const auto* f : order) {
        const std::string block = file_block(*f, language.empty() ? infer_language(f->path) : language);
        const std::size_t tokens = estimate_tokens(block.size());
        if (tokens > cap) {
            flush();
            current.files.push_back(f->path);
            current.text = block;
            current.oversize = true;
            flush();
            continue;
        }
        if (used + tokens > cap) flush();
        current.files.push_back(f->path);
        current.text += block;
        used += tokens;
    }
    flush();
    return out;
}

}  // namespace curator::pack
