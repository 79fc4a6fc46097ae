#include "curator/basic_filter.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "curator/errors.hpp"
#include "curator/language.hpp"
#include "curator/parallel.hpp"
#include "curator/text.hpp"

namespace curator::filter {

namespace {

struct LexProfile {
    std::string_view line_comment;
    std::string_view line_comment_alt;
    std::string_view block_open;
    std::string_view block_close;
    bool single_quote_strings = true;
    bool backtick_strings = false;
};

LexProfile profile_for(std::string_view lang) {
    static constexpr std::string_view hash_langs[] = {
        "Python", "Shell", "Ruby", "Perl", "R", "Julia", "Tcl", "Tcsh", "AWK", "YAML",
        "Makefile", "CMake", "Dockerfile", "Elixir", "PowerShell", "Nim", "Stan", "Augeas",
    };
    static constexpr std::string_view lisp_langs[] = {
        "Common Lisp", "Emacs Lisp", "Scheme", "Racket", "Clojure",
    };
    static constexpr std::string_view ml_langs[] = {"OCaml", "Standard ML", "F#", "Isabelle"};
    static constexpr std::string_view dash_langs[] = {"Haskell", "Elm", "Idris", "Agda", "Lean", "SQL", "VHDL", "Ada", "Lua"};

    auto in = [&](const auto& list) { return std::find(std::begin(list), std::end(list), lang) != std::end(list); };
    if (in(hash_langs)) return {"#", {}, {}, {}, true, lang == "Shell"};
    if (in(lisp_langs)) return {";", {}, "#|", "|#", false, false};
    if (in(ml_langs)) return {"//", {}, "(*", "*)", false, false};
    if (in(dash_langs)) {
        if (lang == "Haskell" || lang == "Elm" || lang == "Idris" || lang == "Agda")
            return {"--", {}, "{-", "-}", false, false};
        if (lang == "Lua") return {"--", {}, "--[[", "]]", true, false};
        return {"--", {}, "/*", "*/", true, false};
    }
    if (lang == "Rust") return {"//", {}, "/*", "*/", false, false};
    if (lang == "JavaScript" || lang == "TypeScript") return {"//", {}, "/*", "*/", true, true};
    if (lang == "PHP") return {"//", "#", "/*", "*/", true, false};
    if (lang == "MATLAB" || lang == "TeX" || lang == "Prolog") return {"%", {}, {}, {}, lang == "Prolog", false};
    if (lang == "Assembly") return {";", "#", "/*", "*/", true, false};
    if (lang == "Batchfile") return {"REM", "::", {}, {}, false, false};
    return {"//", {}, "/*", "*/", true, false};
}

bool starts_with(std::string_view s, std::size_t i, std::string_view tok) {
    return !tok.empty() && s.substr(i, tok.size()) == tok;
}

}  // namespace

BalancedDelimiterChecker::BalancedDelimiterChecker(std::string language) : language_(std::move(language)) {}

std::size_t BalancedDelimiterChecker::count_errors(std::string_view s) const {
    const LexProfile p = profile_for(language_);
    const bool python = language_ == "Python";
    std::vector<char> stack;
    std::size_t errors = 0;
    std::size_t i = 0;
    const std::size_t n = s.size();

    auto skip_string = [&](std::string_view quote) {
        i += quote.size();
        while (i < n) {
            if (s[i] == '\\') {
                i += 2;
                continue;
            }
            if (starts_with(s, i, quote)) {
                i += quote.size();
                return;
            }
            // single-quoted literals end at newline unless triple-quoted
            if (s[i] == '\n' && quote.size() == 1 && quote[0] != '`') {
                ++i;
                return;
            }
            ++i;
        }
    };

    while (i < n) {
        if (starts_with(s, i, p.block_open)) {
            const auto end = s.find(p.block_close, i + p.block_open.size());
            i = end == std::string_view::npos ? n : end + p.block_close.size();
            continue;
        }
        if (starts_with(s, i, p.line_comment) || starts_with(s, i, p.line_comment_alt)) {
            const auto end = s.find('\n', i);
            i = end == std::string_view::npos ? n : end;
            continue;
        }
        const char c = s[i];
        if (python && (starts_with(s, i, "\"\"\"") || starts_with(s, i, "'''"))) {
            skip_string(s.substr(i, 3));
            continue;
        }
        if (c == '"' || (c == '\'' && p.single_quote_strings) || (c == '`' && p.backtick_strings)) {
            skip_string(s.substr(i, 1));
            continue;
        }
        if (c == '(' || c == '[' || c == '{') {
            stack.push_back(c);
        } else if (c == ')' || c == ']' || c == '}') {
            const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
            if (stack.empty() || stack.back() != open) {
                ++errors;
            } else {
                stack.pop_back();
            }
        }
        ++i;
    }
    return errors + stack.size();
}

void ParserRegistry::bind(const std::string& language, std::shared_ptr<const ParserAdapter> parser) {
    parsers_[language] = std::move(parser);
}

const ParserAdapter* ParserRegistry::find(const std::string& language) const {
    auto it = parsers_.find(language);
    return it == parsers_.end() ? nullptr : it->second.get();
}

FilterVerdict syntax_check(const CodeDocument& doc, const ParserRegistry& parsers) {
    FilterVerdict v{doc.id, true, {}, {}};
    const ParserAdapter* parser = parsers.find(doc.language);
    std::optional<BalancedDelimiterChecker> fallback;
    if (!parser) {
        if (is_prose_language(doc.language)) return v;
        fallback.emplace(doc.language);
        parser = &*fallback;
    }
    try {
        if (parser->count_errors(doc.content) > 0) {
            v.kept = false;
            v.rule = "syntax";
        }
    } catch (const std::exception& e) {
        spdlog::warn("syntax_check: parser failed on {}: {}", doc.id, e.what());
        v.flags.push_back("parser-error");
    } catch (...) {
        spdlog::warn("syntax_check: parser failed on {}", doc.id);
        v.flags.push_back("parser-error");
    }
    return v;
}

FilterVerdict web_minimal_filter(const CodeDocument& doc) {
    FilterVerdict v{doc.id, true, {}, {}};
    const std::size_t words = text::word_count(doc.content);
    if (words == 0) {
        v.kept = false;
        v.rule = "empty";
    } else if (words < kMinWebWords) {
        v.kept = false;
        v.rule = "min-words";
    }
    return v;
}

std::vector<Rule> parse_rules(std::string_view list) {
    std::vector<Rule> rules;
    std::size_t start = 0;
    while (start <= list.size()) {
        auto end = list.find(',', start);
        if (end == std::string_view::npos) end = list.size();
        const auto name = list.substr(start, end - start);
        if (name == "syntax") {
            rules.push_back(Rule::Syntax);
        } else if (name == "webmin") {
            rules.push_back(Rule::WebMinimal);
        } else if (!name.empty()) {
            throw ConfigError("unknown filter rule: " + std::string(name));
        }
        start = end + 1;
    }
    return rules;
}

std::vector<FilterVerdict> run_filters(std::span<const CodeDocument> docs, std::span<const Rule> rules,
                                       const ParserRegistry& parsers, unsigned workers) {
    std::vector<FilterVerdict> out(docs.size());
    parallel_for(docs.size(), workers, [&](std::size_t i) {
        FilterVerdict merged{docs[i].id, true, {}, {}};
        for (Rule r : rules) {
            auto v = r == Rule::Syntax ? syntax_check(docs[i], parsers) : web_minimal_filter(docs[i]);
            merged.flags.insert(merged.flags.end(), v.flags.begin(), v.flags.end());
            if (!v.kept) {
                merged.kept = false;
                merged.rule = v.rule;
                break;
            }
        }
        out[i] = std::move(merged);
    });
    return out;
}

}  // namespace curator::filter
