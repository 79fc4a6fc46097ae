#include "curator/language.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "curator/text.hpp"

namespace curator {

namespace {

constexpr std::array<std::string_view, 89> kLanguages = {
    "ANTLR", "Ada", "Agda", "Alloy", "AppleScript", "Assembly", "Augeas", "AWK", "Batchfile",
    "Bluespec", "C", "C#", "C++", "CMake", "CSS", "Clojure", "CoffeeScript", "Common Lisp", "CUDA",
    "Dart", "Dockerfile", "Elixir", "Elm", "Emacs Lisp", "Erlang", "F#", "Fortran", "GLSL", "Go",
    "Groovy", "HTML", "Haskell", "Idris", "Isabelle", "JSON", "Java", "Java Server Pages",
    "JavaScript", "Julia", "Kotlin", "Lean", "Literate Agda", "Literate CoffeeScript",
    "Literate Haskell", "Lua", "Makefile", "Maple", "Markdown", "Mathematica", "MATLAB", "OCaml",
    "PHP", "Pascal", "Perl", "PowerShell", "Prolog", "Protocol Buffer", "Python", "R", "RMarkdown",
    "Racket", "Ruby", "Rust", "SAS", "SPARQL", "SQL", "Scala", "Scheme", "Shell", "Smalltalk",
    "Solidity", "Stan", "Standard ML", "Stata", "Swift", "SystemVerilog", "Tcl", "Tcsh", "TeX",
    "Thrift", "TypeScript", "VHDL", "Verilog", "Visual Basic", "XSLT", "YAML", "Yacc", "Zig",
    "reStructuredText",
};

struct Rule {
    std::string_view key;
    std::string_view language;
};

// Extensions are matched lowercased. Ambiguous extensions resolve to the more
// common language (.m -> MATLAB, .pl -> Perl, .v -> Verilog).
constexpr Rule kExtensions[] = {
    {"g4", "ANTLR"}, {"adb", "Ada"}, {"ads", "Ada"}, {"ada", "Ada"}, {"agda", "Agda"},
    {"als", "Alloy"}, {"applescript", "AppleScript"}, {"scpt", "AppleScript"},
    {"asm", "Assembly"}, {"s", "Assembly"}, {"nasm", "Assembly"}, {"aug", "Augeas"},
    {"awk", "AWK"}, {"bat", "Batchfile"}, {"cmd", "Batchfile"}, {"bsv", "Bluespec"},
    {"c", "C"}, {"h", "C"}, {"cs", "C#"}, {"cpp", "C++"}, {"cc", "C++"}, {"cxx", "C++"},
    {"c++", "C++"}, {"hpp", "C++"}, {"hh", "C++"}, {"hxx", "C++"}, {"h++", "C++"},
    {"ipp", "C++"}, {"tpp", "C++"}, {"cmake", "CMake"}, {"css", "CSS"}, {"clj", "Clojure"},
    {"cljs", "Clojure"}, {"cljc", "Clojure"}, {"edn", "Clojure"}, {"coffee", "CoffeeScript"},
    {"lisp", "Common Lisp"}, {"lsp", "Common Lisp"}, {"cl", "Common Lisp"}, {"cu", "CUDA"},
    {"cuh", "CUDA"}, {"dart", "Dart"}, {"dockerfile", "Dockerfile"}, {"ex", "Elixir"},
    {"exs", "Elixir"}, {"elm", "Elm"}, {"el", "Emacs Lisp"}, {"erl", "Erlang"},
    {"hrl", "Erlang"}, {"fs", "F#"}, {"fsi", "F#"}, {"fsx", "F#"}, {"f", "Fortran"},
    {"f77", "Fortran"}, {"f90", "Fortran"}, {"f95", "Fortran"}, {"f03", "Fortran"},
    {"f08", "Fortran"}, {"for", "Fortran"}, {"glsl", "GLSL"}, {"vert", "GLSL"},
    {"frag", "GLSL"}, {"geom", "GLSL"}, {"go", "Go"}, {"groovy", "Groovy"},
    {"gradle", "Groovy"}, {"html", "HTML"}, {"htm", "HTML"}, {"hs", "Haskell"},
    {"idr", "Idris"}, {"thy", "Isabelle"}, {"json", "JSON"}, {"java", "Java"},
    {"jsp", "Java Server Pages"}, {"js", "JavaScript"}, {"mjs", "JavaScript"},
    {"cjs", "JavaScript"}, {"jsx", "JavaScript"}, {"jl", "Julia"}, {"kt", "Kotlin"},
    {"kts", "Kotlin"}, {"lean", "Lean"}, {"lagda", "Literate Agda"},
    {"litcoffee", "Literate CoffeeScript"}, {"lhs", "Literate Haskell"}, {"lua", "Lua"},
    {"mk", "Makefile"}, {"mak", "Makefile"}, {"mpl", "Maple"}, {"md", "Markdown"},
    {"markdown", "Markdown"}, {"nb", "Mathematica"}, {"wl", "Mathematica"},
    {"wls", "Mathematica"}, {"m", "MATLAB"}, {"ml", "OCaml"}, {"mli", "OCaml"},
    {"php", "PHP"}, {"pas", "Pascal"}, {"pp", "Pascal"}, {"pl", "Perl"}, {"pm", "Perl"},
    {"ps1", "PowerShell"}, {"psm1", "PowerShell"}, {"pro", "Prolog"}, {"prolog", "Prolog"},
    {"proto", "Protocol Buffer"}, {"py", "Python"}, {"pyi", "Python"}, {"r", "R"},
    {"rmd", "RMarkdown"}, {"rkt", "Racket"}, {"rb", "Ruby"}, {"rs", "Rust"}, {"sas", "SAS"},
    {"sparql", "SPARQL"}, {"rq", "SPARQL"}, {"sql", "SQL"}, {"scala", "Scala"},
    {"sc", "Scala"}, {"scm", "Scheme"}, {"ss", "Scheme"}, {"sh", "Shell"}, {"bash", "Shell"},
    {"zsh", "Shell"}, {"st", "Smalltalk"}, {"sol", "Solidity"}, {"stan", "Stan"},
    {"sml", "Standard ML"}, {"sig", "Standard ML"}, {"do", "Stata"}, {"ado", "Stata"},
    {"swift", "Swift"}, {"sv", "SystemVerilog"}, {"svh", "SystemVerilog"}, {"tcl", "Tcl"},
    {"tcsh", "Tcsh"}, {"csh", "Tcsh"}, {"tex", "TeX"}, {"sty", "TeX"}, {"cls", "TeX"},
    {"thrift", "Thrift"}, {"ts", "TypeScript"}, {"tsx", "TypeScript"}, {"vhd", "VHDL"},
    {"vhdl", "VHDL"}, {"v", "Verilog"}, {"vb", "Visual Basic"}, {"bas", "Visual Basic"},
    {"xslt", "XSLT"}, {"xsl", "XSLT"}, {"yaml", "YAML"}, {"yml", "YAML"}, {"y", "Yacc"},
    {"yy", "Yacc"}, {"zig", "Zig"}, {"rst", "reStructuredText"},
};

constexpr Rule kFilenames[] = {
    {"Makefile", "Makefile"},     {"makefile", "Makefile"},     {"GNUmakefile", "Makefile"},
    {"Dockerfile", "Dockerfile"}, {"CMakeLists.txt", "CMake"},  {"Rakefile", "Ruby"},
    {"Gemfile", "Ruby"},
};

const std::unordered_map<std::string_view, std::string_view>& extension_table() {
    static const auto table = [] {
        std::unordered_map<std::string_view, std::string_view> t;
        for (const auto& r : kExtensions) t.emplace(r.key, r.language);
        return t;
    }();
    return table;
}

}  // namespace

std::span<const std::string_view> supported_languages() { return kLanguages; }

bool is_supported_language(std::string_view tag) {
    return std::find(kLanguages.begin(), kLanguages.end(), tag) != kLanguages.end();
}

std::string infer_language(std::string_view path, std::string_view /*content*/) {
    const auto slash = path.find_last_of('/');
    const std::string_view name = slash == std::string_view::npos ? path : path.substr(slash + 1);

    const auto dot = name.find_last_of('.');
    if (dot != std::string_view::npos && dot + 1 < name.size()) {
        const std::string ext = text::ascii_lower(name.substr(dot + 1));
        const auto& table = extension_table();
        if (auto it = table.find(ext); it != table.end()) return std::string(it->second);
    }
    for (const auto& r : kFilenames) {
        if (name == r.key) return std::string(r.language);
    }
    return std::string(kUnknownLanguage);
}

bool is_prose_language(std::string_view tag) {
    static constexpr std::string_view prose[] = {
        "Markdown", "reStructuredText", "RMarkdown", "TeX", "HTML", "Literate Agda",
        "Literate CoffeeScript", "Literate Haskell", kUnknownLanguage,
    };
    return std::find(std::begin(prose), std::end(prose), tag) != std::end(prose);
}

}  // namespace curator
