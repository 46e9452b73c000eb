#ifndef KRYDOM_HARNESS_HPP
#define KRYDOM_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "krydom/bounds.hpp"
#include "krydom/lowrank.hpp"
#include "krydom/matrix_core.hpp"

namespace krydom::harness {

inline constexpr const char* kLibraryVersion = "0.1.0";

/**
 * Deterministic splitmix64 stream with a Box-Muller gaussian on top. Streams
 * are derived by a counter scheme: derive(seed, a, b) finalizes seed, a and b
 * through the splitmix64 mixer in order, so (gridIndex, trial) pairs map to
 * independent streams identically in serial and parallel runs.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double uniform();   // [0, 1)
    double gaussian();  // standard normal

    static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

  private:
    std::uint64_t state_;
};

/// Non-increasing, non-negative target spectrum; DSL "3,2*3,1" = (3,2,2,2,1).
struct SpectrumSpec {
    std::vector<double> values;

    static SpectrumSpec parse(const std::string& dsl);
    std::string dsl() const;
};

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// QR of a seeded gaussian with the R diagonal signs folded in (Haar measure).
Matrix haar_orthogonal(Index n, Rng& rng);

/// A = U diag(sigma) V^T with independent Haar factors per seed.
Matrix generate_test_matrix(const SpectrumSpec& spectrum, Index rows, Index cols,
                            std::uint64_t seed);

enum class GuessMode { ExactDominant, Perturbed, Random, AdversarialOrthogonal };

GuessMode guess_mode_from_string(const std::string& name);
std::string to_string(GuessMode mode);

/**
 * Starting guesses with n rows and h columns. ExactDominant returns the top
 * right singular vectors; Perturbed adds eps * gaussian noise and
 * renormalizes columns; Random is plain gaussian; AdversarialOrthogonal
 * builds columns orthogonal to the free cluster directions so that
 * h-compatibility fails whenever that is possible at all.
 */
Matrix generate_guess(const SVDFactorization& svd, Index h, GuessMode mode, std::uint64_t seed,
                      double eps = 0.1, double clusterTol = kDefaultClusterTol);

struct ExperimentConfig {
    SpectrumSpec spectrum;
    Index rows = 12, cols = 10;
    Index h = 2;
    std::vector<int> qGrid{1, 2, 3};
    std::vector<int> tGrid{1, 2};
    GuessMode guessMode = GuessMode::Random;
    double guessEps = 0.1;
    int trials = 4;
    std::uint64_t seed = 1;
    double clusterTol = kDefaultClusterTol;
    double rankTol = kDefaultRankTol;
    double theta0 = 0.78539816339744830962;  // pi/4
    int residualSpan = 5;                    // residual series runs q0 .. q0+span
    std::string jsonPath = "sweep_report.json";
    std::string csvPath = "sweep_report.csv";

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig demo();
    std::string to_json() const;
    void validate() const;
};

struct SweepRow {
    std::uint64_t seed = 0;
    int q = 0, t = 0;
    Index h = 0;
    bool ok = false;           // hypotheses held and all stages ran
    std::string status;        // "ok" or the failure category
    BoundCertificate t31, c32, t33, t34;
    ResidualSeries residual;
    bool residualMonotone = false;
    LowRankCertificate lowrank;
    int violations = 0;
};

struct SweepSummary {
    int rows = 0;
    int violations = 0;
    std::string jsonPath, csvPath;
};

/// Runs the full grid; writes one JSON report and one CSV table, both byte
/// deterministic for a fixed config. threads <= 0 reads KRYDOM_THREADS.
SweepSummary run_sweep(const ExperimentConfig& config, int threads = 0);

}  // namespace krydom::harness

#endif
