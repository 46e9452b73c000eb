// Command line front end: spectrum partitions, compatibility checks, bound
// certificates, certified low-rank runs and reproducible sweeps.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "krydom/bounds.hpp"
#include "krydom/harness.hpp"
#include "krydom/io.hpp"
#include "krydom/lowrank.hpp"

namespace {

using namespace krydom;

struct MatrixSource {
    std::string matrixFile;
    std::string spectrumDsl;
    Index rows = 0, cols = 0;
    std::uint64_t seed = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--matrix", matrixFile, "matrix file (.mtx/.mm or .csv)");
        cmd->add_option("--spectrum", spectrumDsl,
                        "synthetic spectrum DSL, e.g. 3,2*3,1 (with --dims)");
        cmd->add_option("--rows", rows, "synthetic row count");
        cmd->add_option("--cols", cols, "synthetic column count");
        cmd->add_option("--seed", seed, "seed for synthetic inputs")->capture_default_str();
    }

    Matrix load() const {
        if (!matrixFile.empty()) {
            const auto dot = matrixFile.rfind('.');
            const std::string ext = dot == std::string::npos ? "" : matrixFile.substr(dot);
            if (ext == ".csv") return io::read_csv(matrixFile);
            return io::read_matrix_market(matrixFile);
        }
        if (spectrumDsl.empty() || rows < 1 || cols < 1) {
            throw InvalidArgument("either --matrix or --spectrum with --rows/--cols is required");
        }
        return harness::generate_test_matrix(harness::SpectrumSpec::parse(spectrumDsl), rows,
                                             cols, seed);
    }
};

struct GuessSource {
    std::string guessFile;
    std::string guessMode = "random";
    double guessEps = 0.1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--guess", guessFile, "starting guess file (.mtx or .csv)");
        cmd->add_option("--guess-mode", guessMode,
                        "exact-dominant|perturbed|random|adversarial-orthogonal")->capture_default_str();
        cmd->add_option("--guess-eps", guessEps, "perturbation size for perturbed mode")->capture_default_str();
    }

    Matrix load(const SVDFactorization& svd, Index h, std::uint64_t seed) const {
        if (!guessFile.empty()) {
            const auto dot = guessFile.rfind('.');
            const std::string ext = dot == std::string::npos ? "" : guessFile.substr(dot);
            if (ext == ".csv") return io::read_csv(guessFile);
            return io::read_matrix_market(guessFile);
        }
        return harness::generate_guess(svd, h, harness::guess_mode_from_string(guessMode), seed,
                                       guessEps);
    }
};

void emit(const std::string& json, const std::string& outPath) {
    if (outPath.empty()) {
        std::cout << json << "\n";
    } else {
        std::ofstream out(outPath);
        if (!out) throw InvalidArgument("cannot open output file: " + outPath);
        out << json << "\n";
    }
}

std::string partition_json(const SpectrumPartition& p) {
    std::ostringstream os;
    os << "{\"h\":" << p.h << ",\"j\":" << p.j << ",\"k\":" << p.k << ",\"q0\":" << p.q0
       << ",\"rank\":" << p.rank << ",\"gammaJ\":"
       << (p.gammaJ ? io::format_double(*p.gammaJ) : "null") << ",\"gammaK\":"
       << (p.gammaK ? io::format_double(*p.gammaK) : "null")
       << ",\"jIsZero\":" << (p.jIsZero() ? "true" : "false")
       << ",\"kIsRank\":" << (p.kIsRank() ? "true" : "false")
       << ",\"clusterTol\":" << io::format_double(p.clusterTol) << ",\"clusters\":[";
    for (std::size_t c = 0; c < p.clusters.size(); ++c) {
        os << (c ? "," : "") << "[" << p.clusters[c].first << "," << p.clusters[c].second << "]";
    }
    os << "]}";
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"block Krylov dominant-subspace approximation with certified bounds"};
    app.require_subcommand(1);

    MatrixSource src;
    GuessSource guess;
    Index h = 1;
    int q = 1, t = 1;
    double clusterTol = kDefaultClusterTol;
    double rankTol = kDefaultRankTol;
    double theta0 = 0.78539816339744830962;
    std::string theorem = "t33";
    std::string outPath;
    std::string exportUHat;
    std::string configPath;
    int ell = -1;
    int threads = 0;

    auto* cmdSpectrum = app.add_subcommand("spectrum", "partition the singular spectrum at h");
    src.attach(cmdSpectrum);
    cmdSpectrum->add_option("--h", h, "target index")->required();
    cmdSpectrum->add_option("--cluster-tol", clusterTol, "cluster tolerance")->capture_default_str();
    cmdSpectrum->add_option("--out", outPath, "output file (default stdout)");

    auto* cmdCompat = app.add_subcommand("compat", "h-compatibility of a matrix/guess pair");
    src.attach(cmdCompat);
    guess.attach(cmdCompat);
    cmdCompat->add_option("--h", h, "target dimension")->required();
    cmdCompat->add_option("--cluster-tol", clusterTol, "cluster tolerance")->capture_default_str();
    cmdCompat->add_option("--rank-tol", rankTol, "rank tolerance")->capture_default_str();
    cmdCompat->add_option("--out", outPath, "output file (default stdout)");

    auto* cmdBound = app.add_subcommand("bound", "evaluate one bound certificate");
    src.attach(cmdBound);
    guess.attach(cmdBound);
    cmdBound->add_option("--theorem", theorem, "t31|c32|t33|t34")->capture_default_str();
    cmdBound->add_option("--h", h, "target dimension")->required();
    cmdBound->add_option("--q", q, "power order")->capture_default_str();
    cmdBound->add_option("--t", t, "augmentation order (t33/t34)")->capture_default_str();
    cmdBound->add_option("--cluster-tol", clusterTol, "cluster tolerance")->capture_default_str();
    cmdBound->add_option("--rank-tol", rankTol, "rank tolerance")->capture_default_str();
    cmdBound->add_option("--out", outPath, "output file (default stdout)");

    auto* cmdLowrank = app.add_subcommand("lowrank", "proto-algorithm with certificate");
    src.attach(cmdLowrank);
    guess.attach(cmdLowrank);
    cmdLowrank->add_option("--h", h, "target rank")->required();
    cmdLowrank->add_option("--q", q, "power order")->capture_default_str();
    cmdLowrank->add_option("--t", t, "augmentation order")->capture_default_str();
    cmdLowrank->add_option("--ell", ell, "run uncertified at this power parameter");
    cmdLowrank->add_option("--theta0", theta0, "certificate angle in (0, pi/2)")->capture_default_str();
    cmdLowrank->add_option("--cluster-tol", clusterTol, "cluster tolerance")->capture_default_str();
    cmdLowrank->add_option("--rank-tol", rankTol, "rank tolerance")->capture_default_str();
    cmdLowrank->add_option("--export-uhat", exportUHat, "write the isometry as matrix market");
    cmdLowrank->add_option("--out", outPath, "output file (default stdout)");

    auto* cmdSweep = app.add_subcommand("sweep", "run a configured experiment sweep");
    cmdSweep->add_option("--config", configPath, "JSON config file")->required();
    cmdSweep->add_option("--threads", threads,
                         "worker threads (default: KRYDOM_THREADS or 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmdSpectrum->parsed()) {
            const Matrix A = src.load();
            const SVDFactorization svd = thin_svd(A);
            emit(partition_json(partition_at(svd, h, clusterTol)), outPath);
        } else if (cmdCompat->parsed()) {
            const Matrix A = src.load();
            const SVDFactorization svd = thin_svd(A, rankTol);
            const Matrix X = guess.load(svd, h, src.seed);
            const HCompatibility hc = is_h_compatible(svd, X, h, rankTol, clusterTol);
            std::ostringstream os;
            os << "{\"h\":" << h << ",\"compatible\":" << (hc.compatible ? "true" : "false")
               << ",\"marginAngle\":" << io::format_double(hc.marginAngle)
               << ",\"rankXS\":" << hc.rankXS << "}";
            emit(os.str(), outPath);
        } else if (cmdBound->parsed()) {
            const Matrix A = src.load();
            const SVDFactorization svd = thin_svd(A, rankTol);
            const Matrix X = guess.load(svd, h, src.seed);
            BoundCertificate cert;
            if (theorem == "t31") {
                const SpectrumPartition part = partition_at(svd, h, clusterTol);
                const OddPolynomial phi =
                    part.k < svd.rank
                        ? build_amplifier(svd.sigma(part.k - 1), svd.sigma(part.k), q)
                        : OddPolynomial::identity();
                cert = thm31_bound(svd, X, h, q, phi, clusterTol, rankTol);
            } else if (theorem == "c32") {
                cert = cor32_bound(svd, X, h, q, clusterTol, rankTol);
            } else if (theorem == "t33") {
                cert = thm33_bound(svd, X, h, q, t, clusterTol, rankTol);
            } else if (theorem == "t34") {
                cert = thm34_bound(svd, X, h, q, t, clusterTol, rankTol);
            } else {
                throw InvalidArgument("unknown theorem id '" + theorem + "'");
            }
            emit(cert.to_json(true), outPath);
        } else if (cmdLowrank->parsed()) {
            const Matrix A = src.load();
            const SVDFactorization svd = thin_svd(A, rankTol);
            const Matrix X = guess.load(svd, h, src.seed);
            std::string json;
            Matrix uHat;
            if (ell >= 0) {
                const LowRankResult res = proto_algorithm(A, X, h, ell);
                json = res.to_json(true);
                uHat = res.uHat;
            } else {
                const LowRankCertificate lrc =
                    lowrank_certificate(svd, X, h, q, t, theta0, clusterTol, rankTol);
                std::ostringstream os;
                os << "{\"certificate\":" << lrc.cert.to_json(false)
                   << ",\"result\":" << lrc.result.to_json(true) << "}";
                json = os.str();
                uHat = lrc.result.uHat;
            }
            if (!exportUHat.empty()) io::write_matrix_market(uHat, exportUHat);
            emit(json, outPath);
        } else if (cmdSweep->parsed()) {
            const auto config = harness::ExperimentConfig::from_json_file(configPath);
            const harness::SweepSummary summary = harness::run_sweep(config, threads);
            std::cout << "{\"rows\":" << summary.rows
                      << ",\"violations\":" << summary.violations << ",\"json\":\""
                      << summary.jsonPath << "\",\"csv\":\"" << summary.csvPath << "\"}\n";
            return summary.violations == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
