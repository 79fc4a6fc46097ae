#include <cctype>
#include <charconv>

#include "curator/language.hpp"
#include "curator/quality.hpp"

namespace curator::quality {

namespace {

constexpr std::string_view kTemplate =
    "You are an expert of coding. Please carefully evaluate the quality of the {LANGUAGE} code file below "
    "based on the specific quality criteria essential for its potential use in pretraining a large language "
    "model.\n"
    "Begin your assessment with a brief explanation that addresses the key factors listed below. Following "
    "your explanation, assign a numerical rating to the code file on a scale from 1 to 10, where 1 indicates "
    "the lowest quality and 10 indicates the highest quality. Please adhere strictly to the following format "
    "for your rating: \"Rating: [[X]]\", where X is your numerical rating. Note that the zero score policy "
    "should be firstly considered in your analysis, and skip the other criteria if the code meets any zero "
    "score conditions.\n"
    "Criteria for Evaluation:\n"
    "* Readability:\n"
    "- Presence of a reasonable amount of comments.\n"
    "- Inclusion of classes or functions, better with reasonable docstrings that describe the functionality.\n"
    "- Neat and consistent formatting that adheres to common practice.\n"
    "- Good naming conventions and well-structured code.\n"
    "* Modularity:\n"
    "- Avoidance of overly complicated / very long functions through modularization.\n"
    "- Clear separation of logic and functionality, using classes and functions.\n"
    "- Design of each module or component to perform a clear and coherent task.\n"
    "* Clarity:\n"
    "- Minimization of excessively repeated code and code blocks, such as repeatedly calling the same "
    "function for many times.\n"
    "- Avoidance of massive commented-out code blocks.\n"
    "- Avoidance of many random printing statements for debugging.\n"
    "- Clear communication of intentions behind code blocks.\n"
    "* Reusability:\n"
    "- Absence of syntax or logical errors.\n"
    "- Avoidance of embedding lots of hard-coded data directly within the code.\n"
    "- Provision of complete and meaningful functionality, not overly simplistic.\n"
    "- Design that facilitates easy reuse of functions or classes in other projects.\n"
    "* Zero Score Policy:\n"
    "- If the code is mostly configurations, such as very long json objects with many numbers or strings, "
    "rate 0 score.\n"
    "- If the code is essentially a data file which includes lots of hard-coded data, such as too many lines "
    "of numbers or strings, rate 0 score.\n"
    "- If the code has little to none effective logic, or is dominated by literals or assignments without "
    "any complexity, rate 0 score.\n"
    "- If the code is auto-generated, with any comments like \"generated by Django\", rate 0 score.\n"
    "After your analysis, provide your explanation for the aspects evaluated. Then, conclude with the rating "
    "in the specified format. For example, if you rate the code quality as 5 out of 10, you should write: "
    "\"Rating: [[5]]\".\n"
    "{LANGUAGE} code to be assessed:\n"
    "{CONTENT}.\n";

constexpr std::string_view kLanguageSlot = "{LANGUAGE}";
constexpr std::string_view kContentSlot = "{CONTENT}";

bool iequals_at(std::string_view s, std::size_t i, std::string_view word) {
    if (i + word.size() > s.size()) return false;
    for (std::size_t k = 0; k < word.size(); ++k) {
        if (std::tolower(static_cast<unsigned char>(s[i + k])) != word[k]) return false;
    }
    return true;
}

struct RatingMatch {
    std::size_t begin = 0;
    std::string_view digits;
    bool negative = false;
};

// Parses "rating" ws* ":" ws* "[[" ws* [-+]? digits ws* "]]" starting at i.
std::optional<RatingMatch> match_at(std::string_view s, std::size_t i) {
    if (!iequals_at(s, i, "rating")) return std::nullopt;
    RatingMatch m;
    m.begin = i;
    std::size_t p = i + 6;
    auto skip_ws = [&] {
        while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
    };
    skip_ws();
    if (p >= s.size() || s[p] != ':') return std::nullopt;
    ++p;
    skip_ws();
    if (s.substr(p, 2) != "[[") return std::nullopt;
    p += 2;
    skip_ws();
    if (p < s.size() && (s[p] == '-' || s[p] == '+')) {
        m.negative = s[p] == '-';
        ++p;
    }
    const std::size_t d = p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    if (p == d) return std::nullopt;
    m.digits = s.substr(d, p - d);
    skip_ws();
    if (s.substr(p, 2) != "]]") return std::nullopt;
    return m;
}

}  // namespace

std::string_view prompt_template() { return kTemplate; }

std::string render_prompt(std::string_view language, std::string_view content) {
    std::string out;
    out.reserve(kTemplate.size() + content.size() + 2 * language.size());
    std::size_t i = 0;
    while (i < kTemplate.size()) {
        if (kTemplate.substr(i, kLanguageSlot.size()) == kLanguageSlot) {
            out.append(language);
            i += kLanguageSlot.size();
        } else if (kTemplate.substr(i, kContentSlot.size()) == kContentSlot) {
            out.append(content);
            i += kContentSlot.size();
        } else {
            out.push_back(kTemplate[i++]);
        }
    }
    return out;
}

std::string build_quality_prompt(const CodeDocument& doc) {
    const bool known = !doc.language.empty() && doc.language != kUnknownLanguage;
    return render_prompt(known ? std::string_view(doc.language) : std::string_view("code"), doc.content);
}

int extract_rating(std::string_view response) {
    std::optional<RatingMatch> last;
    for (std::size_t i = 0; i < response.size(); ++i) {
        if (auto m = match_at(response, i)) last = m;
    }
    if (!last) throw RatingExtractionError("no \"Rating: [[X]]\" pattern in response");
    const auto digits = last->digits;
    std::size_t first_nonzero = digits.find_first_not_of('0');
    const std::string_view significant =
        first_nonzero == std::string_view::npos ? std::string_view("0") : digits.substr(first_nonzero);
    if (significant.size() > 2) throw RatingRangeError("rating " + std::string(digits) + " outside 0..10");
    int value = 0;
    std::from_chars(significant.data(), significant.data() + significant.size(), value);
    if (last->negative && value != 0) throw RatingRangeError("rating -" + std::string(digits) + " outside 0..10");
    if (value > 10) throw RatingRangeError("rating " + std::to_string(value) + " outside 0..10");
    return value;
}

QualityLabel QualityLabel::from_score(std::string doc_id, int raw_score, std::string oracle_name) {
    if (raw_score < 0 || raw_score > 10) throw RatingRangeError("rating " + std::to_string(raw_score) + " outside 0..10");
    QualityLabel l;
    l.doc_id = std::move(doc_id);
    l.raw_score = raw_score;
    l.rescaled = raw_score / 10.0;
    l.oracle_name = std::move(oracle_name);
    return l;
}

QualityLabel QualityLabel::from_response(std::string doc_id, std::string_view response, std::string oracle_name) {
    auto l = from_score(std::move(doc_id), extract_rating(response), std::move(oracle_name));
    l.explanation = std::string(response);
    return l;
}

Json to_json(const QualityLabel& label) {
    Json j{{"raw_score", label.raw_score}, {"rescaled", label.rescaled}, {"oracle", label.oracle_name}};
    if (label.explanation) j["explanation"] = *label.explanation;
    return j;
}

QualityLabel label_from_json(const std::string& doc_id, const Json& j) {
    auto l = QualityLabel::from_score(doc_id, j.at("raw_score").get<int>(), j.value("oracle", std::string{}));
    if (j.contains("explanation")) l.explanation = j["explanation"].get<std::string>();
    return l;
}

}  // namespace curator::quality
