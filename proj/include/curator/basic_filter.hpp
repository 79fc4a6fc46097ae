#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curator/document.hpp"

namespace curator::filter {

struct FilterVerdict {
    std::string doc_id;
    bool kept = true;
    std::string rule;                 // set when dropped
    std::vector<std::string> flags;   // e.g. "parser-error" on fail-open

    friend bool operator==(const FilterVerdict&, const FilterVerdict&) = default;
};

/// Binds a syntax parser for one or more languages. Implementations must be
/// safe to call concurrently.
class ParserAdapter {
public:
    virtual ~ParserAdapter() = default;
    /// Number of syntax errors found in `content`.
    virtual std::size_t count_errors(std::string_view content) const = 0;
};

/// Delimiter-balance checker used for code languages without a bound parser.
/// String literals and comments are skipped using a per-language lexical
/// profile; (), [] and {} must nest correctly.
class BalancedDelimiterChecker final : public ParserAdapter {
public:
    explicit BalancedDelimiterChecker(std::string language);
    std::size_t count_errors(std::string_view content) const override;

private:
    std::string language_;
};

class ParserRegistry {
public:
    void bind(const std::string& language, std::shared_ptr<const ParserAdapter> parser);
    /// Bound parser for the language, or nullptr.
    const ParserAdapter* find(const std::string& language) const;

private:
    std::map<std::string, std::shared_ptr<const ParserAdapter>> parsers_;
};

/// Keeps the document iff its parser reports zero errors. Languages without a
/// bound parser use BalancedDelimiterChecker; prose languages are always kept.
/// A parser that throws leaves the document kept and flagged "parser-error".
FilterVerdict syntax_check(const CodeDocument& doc, const ParserRegistry& parsers);

inline constexpr std::size_t kMinWebWords = 10;

/// Drops whitespace-only documents (rule "empty") and documents with fewer
/// than ten words (rule "min-words").
FilterVerdict web_minimal_filter(const CodeDocument& doc);

enum class Rule { Syntax, WebMinimal };

/// Parses "syntax,webmin". Throws ConfigError on unknown names.
std::vector<Rule> parse_rules(std::string_view list);

/// Applies `rules` in order; the first rule that drops a document decides.
std::vector<FilterVerdict> run_filters(std::span<const CodeDocument> docs, std::span<const Rule> rules,
                                       const ParserRegistry& parsers, unsigned workers = 1);

}  // namespace curator::filter
