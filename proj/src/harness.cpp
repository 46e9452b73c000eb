#include "krydom/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "krydom/io.hpp"

namespace krydom::harness {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97f4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next() {
    state_ += kGolden;
    return mix64(state_);
}

double Rng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    const double u1 = std::max(uniform(), 0x1.0p-53);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = mix64(seed + kGolden);
    s = mix64(s ^ (kGolden * (a + 1)));
    s = mix64(s ^ (kGolden * (b + 1)));
    return s;
}

SpectrumSpec SpectrumSpec::parse(const std::string& dsl) {
    SpectrumSpec spec;
    std::istringstream ss(dsl);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) throw InvalidArgument("spectrum dsl: empty token in '" + dsl + "'");
        const auto star = token.find('*');
        double value = 0.0;
        long count = 1;
        if (star == std::string::npos) {
            value = std::strtod(token.c_str(), nullptr);
        } else {
            value = std::strtod(token.substr(0, star).c_str(), nullptr);
            count = std::strtol(token.c_str() + star + 1, nullptr, 10);
        }
        if (count < 1) throw InvalidArgument("spectrum dsl: bad repeat count in '" + dsl + "'");
        for (long i = 0; i < count; ++i) spec.values.push_back(value);
    }
    if (spec.values.empty()) throw InvalidArgument("spectrum dsl: no values in '" + dsl + "'");
    return spec;
}

std::string SpectrumSpec::dsl() const {
    std::string out;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t run = 1;
        while (i + run < values.size() && values[i + run] == values[i]) ++run;
        if (!out.empty()) out += ",";
        out += io::format_double(values[i]);
        if (run > 1) out += "*" + std::to_string(run);
        i += run;
    }
    return out;
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
    Matrix G(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) G(i, j) = rng.gaussian();
    return G;
}

Matrix haar_orthogonal(Index n, Rng& rng) {
    const Matrix G = gaussian_matrix(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < n; ++i) {
        if (R(i, i) < 0.0) Q.col(i) = -Q.col(i);
    }
    return Q;
}

Matrix generate_test_matrix(const SpectrumSpec& spectrum, Index rows, Index cols,
                            std::uint64_t seed) {
    const Index len = static_cast<Index>(spectrum.values.size());
    if (len < 1 || len > std::min(rows, cols)) {
        throw InvalidArgument("generate_test_matrix: spectrum length must be in [1, min(m,n)]");
    }
    for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
        if (spectrum.values[i] < 0.0 ||
            (i > 0 && spectrum.values[i] > spectrum.values[i - 1])) {
            throw InvalidArgument("generate_test_matrix: spectrum must be non-increasing, >= 0");
        }
    }
    Rng rngU(Rng::derive(seed, 1, 0));
    Rng rngV(Rng::derive(seed, 2, 0));
    const Matrix U = haar_orthogonal(rows, rngU);
    const Matrix V = haar_orthogonal(cols, rngV);
    Vector sigma(len);
    for (Index i = 0; i < len; ++i) sigma(i) = spectrum.values[i];
    return U.leftCols(len) * sigma.asDiagonal() * V.leftCols(len).transpose();
}

GuessMode guess_mode_from_string(const std::string& name) {
    if (name == "exact-dominant") return GuessMode::ExactDominant;
    if (name == "perturbed") return GuessMode::Perturbed;
    if (name == "random") return GuessMode::Random;
    if (name == "adversarial-orthogonal") return GuessMode::AdversarialOrthogonal;
    throw InvalidArgument("unknown guess mode '" + name + "'");
}

std::string to_string(GuessMode mode) {
    switch (mode) {
        case GuessMode::ExactDominant: return "exact-dominant";
        case GuessMode::Perturbed: return "perturbed";
        case GuessMode::Random: return "random";
        case GuessMode::AdversarialOrthogonal: return "adversarial-orthogonal";
    }
    return "?";
}

Matrix generate_guess(const SVDFactorization& svd, Index h, GuessMode mode, std::uint64_t seed,
                      double eps, double clusterTol) {
    if (h < 1 || h > svd.rank) throw InvalidArgument("generate_guess: h out of range");
    const Index n = svd.cols();
    Rng rng(Rng::derive(seed, 4, 0));

    switch (mode) {
        case GuessMode::ExactDominant:
            return svd.vHead(h);
        case GuessMode::Perturbed: {
            Matrix X = svd.vHead(h) + eps * gaussian_matrix(n, h, rng);
            for (Index c = 0; c < h; ++c) {
                const double nrm = X.col(c).norm();
                if (nrm > 0.0) X.col(c) /= nrm;
            }
            return X;
        }
        case GuessMode::Random:
            return gaussian_matrix(n, h, rng);
        case GuessMode::AdversarialOrthogonal: {
            // Columns orthogonal to every free cluster direction: any dominant
            // subspace then meets R(X) in at most j directions and the rank
            // test fails. When the cluster spans everything, fall back to the
            // zero guess, which is incompatible for every h >= 1.
            const SpectrumPartition part = partition_at(svd, h, clusterTol);
            std::vector<Index> pool;
            for (Index c = part.k; c < n; ++c) pool.push_back(c);     // tail directions
            for (Index c = 0; c < part.j; ++c) pool.push_back(c);     // head directions
            if (pool.empty()) return Matrix::Zero(n, h);
            Matrix X(n, h);
            for (Index c = 0; c < h; ++c) {
                X.col(c) = svd.V.col(pool[static_cast<std::size_t>(c) % pool.size()]);
            }
            return X;
        }
    }
    throw InvalidArgument("generate_guess: unknown mode");
}

ExperimentConfig ExperimentConfig::demo() {
    ExperimentConfig c;
    c.spectrum = SpectrumSpec::parse("3,2*3,1");
    c.rows = 12;
    c.cols = 10;
    c.h = 2;
    c.qGrid = {1, 2, 3};
    c.tGrid = {1, 2};
    c.guessMode = GuessMode::Random;
    c.trials = 4;
    c.seed = 7;
    return c;
}

void ExperimentConfig::validate() const {
    if (qGrid.empty() || tGrid.empty()) throw InvalidArgument("config: grids must be non-empty");
    if (trials < 1) throw InvalidArgument("config: trials must be >= 1");
    for (int q : qGrid)
        if (q < 0) throw InvalidArgument("config: q values must be non-negative");
    for (int t : tGrid)
        if (t < 0) throw InvalidArgument("config: t values must be non-negative");
    if (h < 1) throw InvalidArgument("config: h must be positive");
    if (residualSpan < 0) throw InvalidArgument("config: residualSpan must be non-negative");
    if (spectrum.values.empty()) throw InvalidArgument("config: empty spectrum");
    if (static_cast<Index>(spectrum.values.size()) > std::min(rows, cols)) {
        throw InvalidArgument("config: spectrum longer than min(rows, cols)");
    }
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;

    ExperimentConfig c;
    if (j.contains("spectrum")) {
        if (j["spectrum"].is_string()) {
            c.spectrum = SpectrumSpec::parse(j["spectrum"].get<std::string>());
        } else {
            c.spectrum.values = j["spectrum"].get<std::vector<double>>();
        }
    }
    if (j.contains("dims")) {
        c.rows = j["dims"][0].get<Index>();
        c.cols = j["dims"][1].get<Index>();
    }
    if (j.contains("h")) c.h = j["h"].get<Index>();
    if (j.contains("qGrid")) c.qGrid = j["qGrid"].get<std::vector<int>>();
    if (j.contains("tGrid")) c.tGrid = j["tGrid"].get<std::vector<int>>();
    if (j.contains("guessMode")) c.guessMode = guess_mode_from_string(j["guessMode"]);
    if (j.contains("guessEps")) c.guessEps = j["guessEps"].get<double>();
    if (j.contains("trials")) c.trials = j["trials"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("clusterTol")) c.clusterTol = j["clusterTol"].get<double>();
    if (j.contains("rankTol")) c.rankTol = j["rankTol"].get<double>();
    if (j.contains("theta0")) c.theta0 = j["theta0"].get<double>();
    if (j.contains("residualSpan")) c.residualSpan = j["residualSpan"].get<int>();
    if (j.contains("jsonPath")) c.jsonPath = j["jsonPath"].get<std::string>();
    if (j.contains("csvPath")) c.csvPath = j["csvPath"].get<std::string>();
    c.validate();
    return c;
}

std::string ExperimentConfig::to_json() const {
    std::ostringstream os;
    os << "{\"spectrum\":\"" << spectrum.dsl() << "\",\"dims\":[" << rows << "," << cols
       << "],\"h\":" << h << ",\"qGrid\":[";
    for (std::size_t i = 0; i < qGrid.size(); ++i) os << (i ? "," : "") << qGrid[i];
    os << "],\"tGrid\":[";
    for (std::size_t i = 0; i < tGrid.size(); ++i) os << (i ? "," : "") << tGrid[i];
    os << "],\"guessMode\":\"" << to_string(guessMode) << "\",\"guessEps\":"
       << io::format_double(guessEps) << ",\"trials\":" << trials << ",\"seed\":" << seed
       << ",\"clusterTol\":" << io::format_double(clusterTol)
       << ",\"rankTol\":" << io::format_double(rankTol)
       << ",\"theta0\":" << io::format_double(theta0) << ",\"residualSpan\":" << residualSpan
       << "}";  // output paths intentionally not echoed: reports must not
                // depend on where they are written
    return os.str();
}

namespace {

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("KRYDOM_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

SweepRow run_one(const ExperimentConfig& cfg, int q, int t, std::uint64_t trialSeed) {
    SweepRow row;
    row.seed = trialSeed;
    row.q = q;
    row.t = t;
    row.h = cfg.h;

    try {
        const Matrix A = generate_test_matrix(cfg.spectrum, cfg.rows, cfg.cols, trialSeed);
        const SVDFactorization svd = thin_svd(A, cfg.rankTol);
        const Matrix X = generate_guess(svd, cfg.h, cfg.guessMode,
                                        Rng::derive(trialSeed, 3, 0), cfg.guessEps,
                                        cfg.clusterTol);

        const SpectrumPartition part = partition_at(svd, cfg.h, cfg.clusterTol);
        const OddPolynomial phi =
            part.k < svd.rank
                ? build_amplifier(svd.sigma(part.k - 1), svd.sigma(part.k), q)
                : OddPolynomial::identity();

        row.t31 = thm31_bound(svd, X, cfg.h, q, phi, cfg.clusterTol, cfg.rankTol);
        row.c32 = cor32_bound(svd, X, cfg.h, q, cfg.clusterTol, cfg.rankTol);
        row.t33 = thm33_bound(svd, X, cfg.h, q, t, cfg.clusterTol, cfg.rankTol);
        row.t34 = thm34_bound(svd, X, cfg.h, q, t, cfg.clusterTol, cfg.rankTol);

        const Matrix Arec = svd.reconstruct();
        const KrylovBasis kq = krylov_basis(Arec, X, q);
        const KrylovBasis kqt = krylov_basis(Arec.transpose(), kq.basis.Q, t);
        const KrylovBasis kdeep = krylov_basis(Arec, X, q + t + 1);

        if (!certify_with_fallback(row.t31, svd, kq.basis, Side::Left)) ++row.violations;
        if (!certify_with_fallback(row.c32, svd, kq.basis, Side::Left)) ++row.violations;
        if (!certify_with_fallback(row.t33, svd, kqt.basis, Side::Right)) ++row.violations;
        if (!certify_with_fallback(row.t34, svd, kdeep.basis, Side::Left)) ++row.violations;

        row.residual = residual_series(svd, X, cfg.h, static_cast<int>(part.q0),
                                       static_cast<int>(part.q0) + cfg.residualSpan,
                                       cfg.clusterTol, cfg.rankTol);
        row.residualMonotone = row.residual.nonIncreasing();
        if (!row.residualMonotone) ++row.violations;

        row.lowrank = lowrank_certificate(svd, X, cfg.h, q, t, cfg.theta0, cfg.clusterTol,
                                          cfg.rankTol);
        if (row.lowrank.result.applicable && !row.lowrank.cert.sound()) ++row.violations;

        row.ok = true;
        row.status = "ok";
    } catch (const NotCompatible&) {
        row.status = "not-compatible";
    } catch (const InsufficientKrylovRank&) {
        row.status = "insufficient-krylov-rank";
    } catch (const NoGapAtIndex&) {
        row.status = "no-gap";
    }
    return row;
}

std::string row_json(const SweepRow& row) {
    std::ostringstream os;
    os << "{\"seed\":" << row.seed << ",\"q\":" << row.q << ",\"t\":" << row.t
       << ",\"h\":" << row.h << ",\"status\":\"" << row.status << "\"";
    if (row.ok) {
        os << ",\"certificates\":{\"T31\":" << row.t31.to_json(false)
           << ",\"C32\":" << row.c32.to_json(false) << ",\"T33\":" << row.t33.to_json(false)
           << ",\"T34\":" << row.t34.to_json(false) << "}";
        os << ",\"residual\":{\"k\":" << row.residual.kIndex << ",\"q0\":" << row.residual.q0
           << ",\"qFrom\":" << row.residual.qFrom << ",\"val2\":[";
        for (std::size_t i = 0; i < row.residual.val2.size(); ++i) {
            os << (i ? "," : "") << io::format_double(row.residual.val2[i]);
        }
        os << "],\"valF\":[";
        for (std::size_t i = 0; i < row.residual.valF.size(); ++i) {
            os << (i ? "," : "") << io::format_double(row.residual.valF[i]);
        }
        os << "],\"monotone\":" << (row.residualMonotone ? "true" : "false") << "}";
        os << ",\"lowrank\":{\"certificate\":" << row.lowrank.cert.to_json(false)
           << ",\"result\":" << row.lowrank.result.to_json(false) << "}";
    }
    os << ",\"violations\":" << row.violations << "}";
    return os.str();
}

std::string row_csv(const SweepRow& row) {
    std::ostringstream os;
    const char* na = "nan";
    os << row.seed << "," << row.q << "," << row.t << "," << row.h << ",";
    if (row.ok) {
        const Index h = row.h;
        os << io::format_double(row.t33.lhs2) << "," << io::format_double(row.t33.rhs2) << ","
           << io::format_double(row.t33.lhsF) << "," << io::format_double(row.t33.rhsF) << ","
           << io::format_double(row.lowrank.result.conditionLHS) << ","
           << io::format_double(row.lowrank.result.errorsF[h - 1]) << ","
           << io::format_double(row.lowrank.result.optErrorsF[h - 1]) << ","
           << io::format_double(row.lowrank.result.deltas[h - 1]);
    } else {
        os << na << "," << na << "," << na << "," << na << "," << na << "," << na << "," << na
           << "," << na;
    }
    os << "," << row.violations;
    return os.str();
}

}  // namespace

SweepSummary run_sweep(const ExperimentConfig& config, int threads) {
    config.validate();
    const int nThreads = resolve_threads(threads);

    std::vector<std::pair<int, int>> grid;
    for (int q : config.qGrid)
        for (int t : config.tGrid) grid.emplace_back(q, t);

    const std::size_t total = grid.size() * static_cast<std::size_t>(config.trials);
    std::vector<SweepRow> rows(total);

    auto worker = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t idx = begin; idx < total; idx += stride) {
            const std::size_t gp = idx / static_cast<std::size_t>(config.trials);
            const std::size_t trial = idx % static_cast<std::size_t>(config.trials);
            const std::uint64_t trialSeed = Rng::derive(config.seed, gp, trial);
            rows[idx] = run_one(config, grid[gp].first, grid[gp].second, trialSeed);
        }
    };

    if (nThreads <= 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nThreads);
        for (int tIdx = 0; tIdx < nThreads; ++tIdx) {
            pool.emplace_back(worker, static_cast<std::size_t>(tIdx),
                              static_cast<std::size_t>(nThreads));
        }
        for (auto& th : pool) th.join();
    }

    SweepSummary summary;
    summary.rows = static_cast<int>(total);
    for (const SweepRow& r : rows) summary.violations += r.violations;
    summary.jsonPath = config.jsonPath;
    summary.csvPath = config.csvPath;

    {
        std::ostringstream os;
        os << "{\"schema\":\"krydom-sweep/1\",\"version\":\"" << kLibraryVersion
           << "\",\"config\":" << config.to_json() << ",\"rows\":[";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            os << (i ? "," : "") << row_json(rows[i]);
        }
        os << "],\"summary\":{\"rows\":" << summary.rows
           << ",\"violations\":" << summary.violations << "}}";
        std::ofstream out(config.jsonPath);
        if (!out) throw InvalidArgument("cannot write report: " + config.jsonPath);
        out << os.str() << "\n";
    }
    {
        std::ostringstream os;
        os << "seed,q,t,h,lhs2,rhs2,lhsF,rhsF,conditionLHS,errF_h,optF_h,delta_h,violations\n";
        for (const SweepRow& r : rows) os << row_csv(r) << "\n";
        std::ofstream out(config.csvPath);
        if (!out) throw InvalidArgument("cannot write report: " + config.csvPath);
        out << os.str();
    }
    return summary;
}

}  // namespace krydom::harness
