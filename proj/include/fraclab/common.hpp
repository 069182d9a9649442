#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

enum class ErrorKind { Config, Numeric, Check };

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void config_error(const std::string& msg);
[[noreturn]] void numeric_error(const std::string& msg);
[[noreturn]] void check_error(const std::string& msg);

// Seeded generator with a platform-independent uniform draw.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal();
    int index(int n) { return int(uniform() * n) % n; }
    Vec normal_vec(int n);

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL);
std::string hex64(std::uint64_t h);

// Worker count used by row-parallel loops; every row is computed by the same
// sequence of operations regardless of the count, so results do not depend on it.
void set_threads(int n);
int threads();
void parallel_for(int n, const std::function<void(int)>& body);

// Least-squares slope and intercept of y against x.
struct LineFit {
    double slope = 0, intercept = 0, residual = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

std::string fmt(double v);

// Group sorted values into clusters of numerically equal entries: returns [begin, end) pairs.
std::vector<std::pair<int, int>> clusters(const Vec& sorted, double tol);

}  // namespace fraclab
