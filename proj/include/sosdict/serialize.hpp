#pragma once
//
// sosdict/serialize.hpp
//
// Plain-text file formats for experiment artifacts: polynomials,
// dictionaries, sample batches, and recovered vector sets. Writers print
// doubles in the shortest form that parses back to the same value, so a
// read/write round trip reproduces the file byte for byte.
//

#include <Eigen/Dense>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sosdict/decomp.hpp"
#include "sosdict/dictgen.hpp"
#include "sosdict/polynomial.hpp"

namespace sosdict {

// parse failure with a position the user can jump to; what() reads
// "<path>:<line>: <message>"
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& path, int line, const std::string& message);
    const std::string& path() const { return path_; }
    int line() const { return line_; }

  private:
    std::string path_;
    int line_;
};

// file could not be opened or a write failed; missing() distinguishes a
// nonexistent input from a failed write
class IoError : public std::runtime_error {
  public:
    IoError(const std::string& path, bool missing, const std::string& message);
    const std::string& path() const { return path_; }
    bool missing() const { return missing_; }

  private:
    std::string path_;
    bool missing_;
};

// shortest decimal string that strtod maps back to exactly x
std::string format_double(double x);

void write_polynomial(std::ostream& out, const PolyF& p);
PolyF read_polynomial(std::istream& in, const std::string& path = "<stream>");

void write_dictionary(std::ostream& out, const Dictionary& dict);
Dictionary read_dictionary(std::istream& in, const std::string& path = "<stream>");

void write_samples(std::ostream& out, const std::vector<Eigen::VectorXd>& samples);
std::vector<Eigen::VectorXd> read_samples(std::istream& in, const std::string& path = "<stream>");

void write_recovered(std::ostream& out, const RecoveredSet& set, int nvars);
RecoveredSet read_recovered(std::istream& in, const std::string& path = "<stream>");

// path-based wrappers; opening a missing input throws IoError with
// missing() true, write failures throw with missing() false
PolyF load_polynomial(const std::string& path);
void save_polynomial(const std::string& path, const PolyF& p);
Dictionary load_dictionary(const std::string& path);
void save_dictionary(const std::string& path, const Dictionary& dict);
std::vector<Eigen::VectorXd> load_samples(const std::string& path);
void save_samples(const std::string& path, const std::vector<Eigen::VectorXd>& samples);
RecoveredSet load_recovered(const std::string& path);
void save_recovered(const std::string& path, const RecoveredSet& set, int nvars);

}  // namespace sosdict
