#ifndef PSKC_COMMON_HPP
#define PSKC_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pskc {

class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A flat row-major collection of n points of dimension d.
struct Dataset {
    std::vector<double> coords;  // n * d values, row-major
    std::size_t n = 0;
    std::size_t d = 0;

    Dataset() = default;
    Dataset(std::vector<double> c, std::size_t n_, std::size_t d_)
        : coords(std::move(c)), n(n_), d(d_) {
        if (n * d != coords.size())
            throw invalid_input("Dataset: coordinate count does not match n*d");
    }

    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * d, d};
    }

    void push_back(std::span<const double> p) {
        if (n == 0 && d == 0) d = p.size();
        if (p.size() != d)
            throw invalid_input("Dataset: point dimension mismatch");
        coords.insert(coords.end(), p.begin(), p.end());
        ++n;
    }

    // Every coordinate finite, d >= 1.
    void validate() const {
        if (n == 0 || d == 0)
            throw invalid_input("Dataset: empty dataset");
        for (double v : coords)
            if (!std::isfinite(v))
                throw invalid_input("Dataset: non-finite coordinate");
    }
};

struct LabeledDataset {
    Dataset data;
    std::vector<int> truth;  // empty when unlabeled; -1 entries allowed

    bool has_truth() const { return !truth.empty(); }
};

inline double sq_dist(std::span<const double> a, const double* b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double diff = a[k] - b[k];
        s += diff * diff;
    }
    return s;
}

}  // namespace pskc

#endif
