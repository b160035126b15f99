#include "sosdict/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sosdict {

ParseError::ParseError(const std::string& path, int line, const std::string& message)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + message),
      path_(path),
      line_(line) {}

IoError::IoError(const std::string& path, bool missing, const std::string& message)
    : std::runtime_error(path + ": " + message), path_(path), missing_(missing) {}

std::string format_double(double x) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

namespace {

// tokenizer over one whitespace-separated line, reporting errors with the
// file position it was constructed for
class LineScanner {
  public:
    LineScanner(const std::string& text, const std::string& path, int line)
        : in_(text), path_(path), line_(line) {}

    std::string word(const char* what) {
        std::string w;
        if (!(in_ >> w)) fail(std::string("missing ") + what);
        return w;
    }

    long integer(const char* what) {
        std::string w = word(what);
        char* end = nullptr;
        long v = std::strtol(w.c_str(), &end, 10);
        if (end == w.c_str() || *end != '\0')
            fail(std::string("expected an integer for ") + what + ", got '" + w + "'");
        return v;
    }

    double real(const char* what) {
        std::string w = word(what);
        char* end = nullptr;
        double v = std::strtod(w.c_str(), &end);
        if (end == w.c_str() || *end != '\0')
            fail(std::string("expected a number for ") + what + ", got '" + w + "'");
        return v;
    }

    void done() {
        std::string extra;
        if (in_ >> extra) fail("unexpected trailing token '" + extra + "'");
    }

    [[noreturn]] void fail(const std::string& message) { throw ParseError(path_, line_, message); }

  private:
    std::istringstream in_;
    std::string path_;
    int line_;
};

// next non-blank line; '#' starts a comment line
bool next_line(std::istream& in, std::string& out, int& line) {
    while (std::getline(in, out)) {
        ++line;
        std::size_t start = out.find_first_not_of(" \t\r");
        if (start == std::string::npos || out[start] == '#') continue;
        return true;
    }
    return false;
}

LineScanner expect_line(std::istream& in, const std::string& path, int& line, const char* what) {
    std::string text;
    if (!next_line(in, text, line)) throw ParseError(path, line + 1, std::string("missing ") + what);
    return LineScanner(text, path, line);
}

int positive_dim(LineScanner& sc, const char* what) {
    long v = sc.integer(what);
    if (v < 1 || v > 1'000'000) sc.fail(std::string(what) + " out of range");
    return static_cast<int>(v);
}

Eigen::VectorXd read_vector_tail(LineScanner& sc, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = sc.real("vector entry");
    return v;
}

}  // namespace

void write_polynomial(std::ostream& out, const PolyF& p) {
    out << "polynomial " << p.nvars() << " " << p.terms().size() << "\n";
    for (const auto& [alpha, c] : p.terms()) {
        for (int e : alpha.exponents()) out << e << " ";
        out << format_double(c) << "\n";
    }
}

PolyF read_polynomial(std::istream& in, const std::string& path) {
    int line = 0;
    LineScanner head = expect_line(in, path, line, "polynomial header");
    if (head.word("format tag") != "polynomial") head.fail("expected a 'polynomial' header");
    int nvars = positive_dim(head, "variable count");
    long nterms = head.integer("term count");
    if (nterms < 0) head.fail("negative term count");
    head.done();
    PolyF p(nvars);
    for (long t = 0; t < nterms; ++t) {
        LineScanner sc = expect_line(in, path, line, "term row");
        std::vector<int> e(nvars);
        for (int i = 0; i < nvars; ++i) {
            long v = sc.integer("exponent");
            if (v < 0 || v > 64) sc.fail("exponent out of range");
            e[i] = static_cast<int>(v);
        }
        double c = sc.real("coefficient");
        sc.done();
        p.add_term(MultiIndex(e), c);
    }
    return p;
}

void write_dictionary(std::ostream& out, const Dictionary& dict) {
    out << "dictionary " << dict.n() << " " << dict.m() << " " << format_double(dict.sigma) << " "
        << dict.seed << "\n";
    for (int i = 0; i < dict.n(); ++i) {
        for (int j = 0; j < dict.m(); ++j) out << (j ? " " : "") << format_double(dict.A(i, j));
        out << "\n";
    }
}

Dictionary read_dictionary(std::istream& in, const std::string& path) {
    int line = 0;
    LineScanner head = expect_line(in, path, line, "dictionary header");
    if (head.word("format tag") != "dictionary") head.fail("expected a 'dictionary' header");
    int n = positive_dim(head, "row count");
    int m = positive_dim(head, "column count");
    Dictionary dict;
    dict.sigma = head.real("sigma");
    long seed = head.integer("seed");
    head.done();
    dict.seed = static_cast<std::uint64_t>(seed);
    dict.A.resize(n, m);
    for (int i = 0; i < n; ++i) {
        LineScanner sc = expect_line(in, path, line, "dictionary row");
        for (int j = 0; j < m; ++j) dict.A(i, j) = sc.real("matrix entry");
        sc.done();
    }
    return dict;
}

void write_samples(std::ostream& out, const std::vector<Eigen::VectorXd>& samples) {
    int n = samples.empty() ? 0 : static_cast<int>(samples.front().size());
    out << "samples " << n << " " << samples.size() << "\n";
    for (const auto& y : samples) {
        for (int i = 0; i < n; ++i) out << (i ? " " : "") << format_double(y(i));
        out << "\n";
    }
}

std::vector<Eigen::VectorXd> read_samples(std::istream& in, const std::string& path) {
    int line = 0;
    LineScanner head = expect_line(in, path, line, "samples header");
    if (head.word("format tag") != "samples") head.fail("expected a 'samples' header");
    long n = head.integer("dimension");
    long count = head.integer("sample count");
    if (n < 0 || count < 0) head.fail("negative dimension or count");
    head.done();
    std::vector<Eigen::VectorXd> samples;
    samples.reserve(static_cast<std::size_t>(count));
    for (long t = 0; t < count; ++t) {
        LineScanner sc = expect_line(in, path, line, "sample row");
        samples.push_back(read_vector_tail(sc, static_cast<int>(n)));
        sc.done();
    }
    return samples;
}

void write_recovered(std::ostream& out, const RecoveredSet& set, int nvars) {
    out << "recovered " << nvars << " " << set.vectors.size() << " " << to_string(set.reason)
        << "\n";
    for (const auto& r : set.vectors) {
        out << format_double(r.score) << " " << r.iteration << " " << r.accepted_retry;
        for (int i = 0; i < nvars; ++i) out << " " << format_double(r.v(i));
        out << "\n";
    }
}

RecoveredSet read_recovered(std::istream& in, const std::string& path) {
    int line = 0;
    LineScanner head = expect_line(in, path, line, "recovered header");
    if (head.word("format tag") != "recovered") head.fail("expected a 'recovered' header");
    int nvars = positive_dim(head, "variable count");
    long count = head.integer("vector count");
    if (count < 0) head.fail("negative vector count");
    std::string label = head.word("termination label");
    head.done();
    RecoveredSet set;
    auto reason = termination_from_string(label);
    if (!reason) throw ParseError(path, line, "unknown termination label '" + label + "'");
    set.reason = *reason;
    for (long t = 0; t < count; ++t) {
        LineScanner sc = expect_line(in, path, line, "recovered row");
        RecoveredVector r;
        r.score = sc.real("score");
        r.iteration = static_cast<int>(sc.integer("iteration"));
        r.accepted_retry = static_cast<int>(sc.integer("retry index"));
        r.v = read_vector_tail(sc, nvars);
        sc.done();
        set.vectors.push_back(std::move(r));
    }
    return set;
}

namespace {

template <class Fn>
auto with_input(const std::string& path, Fn fn) {
    std::ifstream in(path);
    if (!in) throw IoError(path, true, "cannot open for reading");
    return fn(in);
}

template <class Fn>
void with_output(const std::string& path, Fn fn) {
    std::ofstream out(path);
    if (!out) throw IoError(path, false, "cannot open for writing");
    fn(out);
    out.flush();
    if (!out) throw IoError(path, false, "write failed");
}

}  // namespace

PolyF load_polynomial(const std::string& path) {
    return with_input(path, [&](std::istream& in) { return read_polynomial(in, path); });
}

void save_polynomial(const std::string& path, const PolyF& p) {
    with_output(path, [&](std::ostream& out) { write_polynomial(out, p); });
}

Dictionary load_dictionary(const std::string& path) {
    return with_input(path, [&](std::istream& in) { return read_dictionary(in, path); });
}

void save_dictionary(const std::string& path, const Dictionary& dict) {
    with_output(path, [&](std::ostream& out) { write_dictionary(out, dict); });
}

std::vector<Eigen::VectorXd> load_samples(const std::string& path) {
    return with_input(path, [&](std::istream& in) { return read_samples(in, path); });
}

void save_samples(const std::string& path, const std::vector<Eigen::VectorXd>& samples) {
    with_output(path, [&](std::ostream& out) { write_samples(out, samples); });
}

RecoveredSet load_recovered(const std::string& path) {
    return with_input(path, [&](std::istream& in) { return read_recovered(in, path); });
}

void save_recovered(const std::string& path, const RecoveredSet& set, int nvars) {
    with_output(path, [&](std::ostream& out) { write_recovered(out, set, nvars); });
}

}  // namespace sosdict
