#include "bifree/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "bifree/acceptance.hpp"
#include "bifree/bimatrix.hpp"
#include "bifree/cumulants.hpp"
#include "bifree/ensembles.hpp"
#include "bifree/limits.hpp"
#include "bifree/mobius.hpp"

namespace bifree::cli {

namespace {

// Insertion-ordered objects so CSV columns come out as documented.
using json = nlohmann::ordered_json;

std::string fmtDouble(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

json estimateRow(const std::string& word, int N, const MomentEstimate& e, double target) {
    return json{{"word", word},
                {"N", N},
                {"samples", e.samples},
                {"mean", e.mean},
                {"stderr", e.stderr_},
                {"target", target},
                {"z", e.z(target)}};
}

std::string rowsToCsv(const json& rows) {
    if (!rows.is_array() || rows.empty()) return "";
    std::ostringstream os;
    const auto& first = rows.front();
    bool head = true;
    for (auto it = first.begin(); it != first.end(); ++it) {
        if (!head) os << ",";
        os << it.key();
        head = false;
    }
    os << "\n";
    for (const auto& row : rows) {
        bool cell = true;
        for (auto it = row.begin(); it != row.end(); ++it) {
            if (!cell) os << ",";
            if (it->is_string())
                os << it->get<std::string>();
            else if (it->is_number_float())
                os << fmtDouble(it->get<double>());
            else
                os << *it;
            cell = false;
        }
        os << "\n";
    }
    return os.str();
}

constexpr const char* kToolVersion = "0.1.0";

// Resolved invocation, attached to every JSON report.
const json* g_config = nullptr;

std::string isoTimestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void writeReport(json doc, const std::string& outPath, const std::string& format,
                 std::ostream& out) {
    const bool csv = format == "csv" ||
                     (format.empty() && outPath.size() > 4 &&
                      outPath.substr(outPath.size() - 4) == ".csv");
    std::string payload;
    if (csv && doc.contains("rows")) {
        payload = rowsToCsv(doc["rows"]);
    } else {
        doc["tool"] = "bifree";
        doc["version"] = kToolVersion;
        doc["timestamp"] = isoTimestamp();
        if (g_config) doc["config"] = *g_config;
        payload = doc.dump(2) + "\n";
    }
    if (outPath.empty()) {
        out << payload;
    } else {
        std::ofstream f(outPath);
        if (!f) throw std::runtime_error("cannot open output path: " + outPath);
        f << payload;
    }
}

CovarianceSpec loadCovariance(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open covariance file: " + path);
    json doc = json::parse(f);
    CovarianceSpec cov;
    for (const auto& l : doc.at("labels")) {
        CovarianceSpec::LabelInfo info;
        info.name = l.at("name").get<std::string>();
        const std::string side = l.at("side").get<std::string>();
        if (side == "l" || side == "left")
            info.side = Side::left;
        else if (side == "r" || side == "right")
            info.side = Side::right;
        else
            throw std::runtime_error("covariance label side must be 'l' or 'r'");
        info.color = l.value("color", 0);
        cov.labels.push_back(std::move(info));
    }
    const auto& m = doc.at("matrix");
    const int n = static_cast<int>(m.size());
    cov.matrix.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cov.matrix(i, j) = m.at(i).at(j).get<double>();
    cov.validate();
    return cov;
}

RationalMatrix parseRationalMatrix(const json& rows) {
    const int n = static_cast<int>(rows.size());
    RationalMatrix m(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows.at(i).size()) != n)
            throw std::runtime_error("constant matrix must be square");
        for (int j = 0; j < n; ++j) {
            const auto& cell = rows.at(i).at(j);
            m.at(i + 1, j + 1) = cell.is_string() ? Rational::parse(cell.get<std::string>())
                                                  : Rational(cell.get<std::int64_t>());
        }
    }
    return m;
}

std::map<std::string, RationalMatrix> parseConstants(const std::vector<std::string>& defs) {
    std::map<std::string, RationalMatrix> out;
    for (const auto& def : defs) {
        auto eq = def.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("constant definition must be name=JSON or name=@file");
        const std::string name = def.substr(0, eq);
        std::string body = def.substr(eq + 1);
        json rows;
        if (!body.empty() && body[0] == '@') {
            std::ifstream f(body.substr(1));
            if (!f) throw std::runtime_error("cannot open constant file: " + body.substr(1));
            rows = json::parse(f);
        } else {
            rows = json::parse(body);
        }
        out.emplace(name, parseRationalMatrix(rows));
    }
    return out;
}

std::vector<int> parseIntList(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) {
                out.push_back(std::stoi(cur));
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    return out;
}

/// Default label assignment for a chi map: the unique covariance label of
/// the matching side at each position.
std::vector<int> defaultAssignment(const ChiMap& chi, const CovarianceSpec& cov) {
    std::vector<int> leftIdx, rightIdx;
    for (std::size_t i = 0; i < cov.labels.size(); ++i)
        (cov.labels[i].side == Side::left ? leftIdx : rightIdx).push_back(static_cast<int>(i));
    std::vector<int> out;
    for (Side t : chi.tags) {
        const auto& pool = (t == Side::left) ? leftIdx : rightIdx;
        if (pool.size() != 1)
            throw std::runtime_error(
                "ambiguous label assignment; pass --labels to pick covariance labels");
        out.push_back(pool.front());
    }
    return out;
}

json configJson(const std::vector<std::string>& args) {
    json cfg = json::array();
    for (const auto& a : args) cfg.push_back(a);
    return cfg;
}

int cmdPartitions(const std::string& chiStr, bool pairs, bool countOnly,
                  const std::string& outPath, const std::string& format, std::ostream& out) {
    const ChiMap chi = ChiMap::parse(chiStr);
    auto parts = enumerate_bnc(chi, pairs);
    json doc{{"chi", chi.str()}, {"pairs_only", pairs}, {"count", parts.size()}};
    if (!countOnly) {
        json arr = json::array();
        for (const auto& p : parts) arr.push_back(json::parse(p.json()));
        doc["partitions"] = arr;
    }
    writeReport(doc, outPath, format, out);
    return 0;
}

int cmdMobius(const std::string& chiStr, const std::string& piStr, const std::string& sigmaStr,
              const std::string& outPath, const std::string& format, std::ostream& out) {
    const ChiMap chi = ChiMap::parse(chiStr);
    const int n = chi.size();
    const SetPartition pi =
        piStr.empty() ? SetPartition::singletons(n) : SetPartition::parseJson(piStr, n);
    const SetPartition sigma =
        sigmaStr.empty() ? SetPartition::full(n) : SetPartition::parseJson(sigmaStr, n);
    MobiusCache cache;
    const Rational mu = mobius_bnc(pi, sigma, chi, cache);
    json doc{{"chi", chi.str()},
             {"pi", json::parse(pi.json())},
             {"sigma", json::parse(sigma.json())},
             {"mu", mu.str()}};
    writeReport(doc, outPath, format, out);
    return 0;
}

int cmdCumulant(const std::string& chiStr, const std::string& poisson, const std::string& covPath,
                const std::string& labels, const std::string& outPath, const std::string& format,
                std::ostream& out) {
    const ChiMap chi = ChiMap::parse(chiStr);
    json doc{{"chi", chi.str()}};
    if (!poisson.empty()) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : poisson + ",") {
            if (c == ',') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (parts.size() != 3)
            throw std::runtime_error("--poisson expects lambda,alpha,beta");
        const Rational lambda = Rational::parse(parts[0]);
        const Rational alpha = Rational::parse(parts[1]);
        const Rational beta = Rational::parse(parts[2]);
        const Rational v = bi_poisson_cumulant<Rational>(chi, lambda, alpha, beta);
        doc["model"] = "bi-poisson";
        doc["value"] = v.str();
        doc["value_num"] = v.num();
        doc["value_den"] = v.den();
        doc["value_float"] = v.toDouble();
    } else if (!covPath.empty()) {
        const CovarianceSpec cov = loadCovariance(covPath);
        double v = 0.0;
        if (chi.size() == 2) {
            std::vector<int> assign = labels.empty()
                                          ? defaultAssignment(chi, cov)
                                          : std::vector<int>{};
            if (!labels.empty()) {
                std::istringstream in(labels);
                std::string name;
                while (std::getline(in, name, ',')) assign.push_back(cov.find(name));
            }
            v = cov.matrix(assign.at(0), assign.at(1));
        }
        doc["model"] = "central-limit";
        doc["value"] = v;
    } else {
        throw std::runtime_error("cumulant: pass --poisson or --cov");
    }
    writeReport(doc, outPath, format, out);
    return 0;
}

int cmdCltMoment(const std::string& chiStr, const std::string& covPath, const std::string& labels,
                 const std::string& outPath, const std::string& format, std::ostream& out) {
    const ChiMap chi = ChiMap::parse(chiStr);
    const CovarianceSpec cov = loadCovariance(covPath);
    std::vector<int> assign;
    if (labels.empty()) {
        assign = defaultAssignment(chi, cov);
    } else {
        std::istringstream in(labels);
        std::string name;
        while (std::getline(in, name, ',')) assign.push_back(cov.find(name));
    }
    const double v = clt_moment<double>(chi, cov, assign);
    json doc{{"chi", chi.str()}, {"value", v}};
    writeReport(doc, outPath, format, out);
    return 0;
}

std::string sidesOf(const MatrixWord& word) {
    std::string chi;
    for (const auto& atom : word)
        if (const auto* m = std::get_if<OperatorMatrix>(&atom))
            chi += (m->side == Side::left ? 'l' : 'r');
    return chi;
}

int cmdWordMoment(const std::vector<std::string>& wordStrs, int N, const std::string& qStr,
                  const std::vector<std::string>& constDefs, bool full,
                  const std::string& outPath, const std::string& format, std::ostream& out) {
    const Rational q = qStr.empty() ? Rational(0) : Rational::parse(qStr);
    auto constants = parseConstants(constDefs);
    if (full) {
        // Full expectation matrix of a single word.
        if (wordStrs.size() != 1)
            throw std::runtime_error("--full expects exactly one --word");
        MatrixWord word = parse_matrix_word(wordStrs.front(), N, q, constants);
        RationalMatrix m = word_expectation(word);
        json rows = json::array();
        for (int i = 1; i <= m.N; ++i) {
            json row = json::array();
            for (int j = 1; j <= m.N; ++j) row.push_back(m.at(i, j).str());
            rows.push_back(row);
        }
        json doc{{"word", wordStrs.front()}, {"N", N}, {"q", q.str()}, {"expectation", rows}};
        writeReport(doc, outPath, format, out);
        return 0;
    }
    // Moment table: one row per word.
    json rows = json::array();
    for (const auto& ws : wordStrs) {
        MatrixWord word = parse_matrix_word(ws, N, q, constants);
        const Rational v = word_moment(word);
        rows.push_back(json{{"word", ws},
                            {"chi", sidesOf(word)},
                            {"value", v.str()},
                            {"value_num", v.num()},
                            {"value_den", v.den()}});
    }
    json doc{{"N", N}, {"q", q.str()}, {"rows", rows}};
    if (rows.size() == 1) {
        doc["word"] = wordStrs.front();
        doc["value"] = rows[0]["value"];
    }
    writeReport(doc, outPath, format, out);
    return 0;
}

int cmdGaussMc(const std::string& covPath, const std::string& wordStr, int N, long samples,
               std::uint64_t seed, const std::string& outPath, const std::string& format,
               std::ostream& out) {
    const CovarianceSpec cov = loadCovariance(covPath);
    PairEnsembleSpec spec;
    spec.N = N;
    spec.seed = seed;
    spec.gaussian = cov;

    SampledWord word;
    std::vector<Side> tags;
    std::vector<int> assign;
    std::istringstream in(wordStr);
    std::string name;
    while (in >> name) {
        const int idx = cov.find(name);
        SampledLetter l;
        l.src = SampledLetter::Src::gauss;
        l.side = cov.labels[idx].side;
        l.gaussLabel = idx;
        l.color = cov.labels[idx].color;
        word.push_back(l);
        tags.push_back(l.side);
        assign.push_back(idx);
    }
    if (word.empty()) throw std::runtime_error("gauss-mc: empty word");
    const ChiMap chi{tags};
    const double target = clt_moment<double>(chi, cov, assign);
    const MomentEstimate e = estimate_word_moment(spec, word, samples);
    json doc{{"seed", seed}, {"rows", json::array({estimateRow(wordStr, N, e, target)})}};
    writeReport(doc, outPath, format, out);
    return 0;
}

int cmdWishartMc(const std::string& lambdaStr, double alpha, double beta, int N, long samples,
                 std::uint64_t seed, const std::string& wordStr, const std::string& outPath,
                 const std::string& format, std::ostream& out) {
    const double lambda = Rational::parse(lambdaStr).toDouble();
    int lc = 0, rc = 0;
    std::istringstream in(wordStr);
    std::string tok;
    while (in >> tok) {
        if (tok == "l")
            ++lc;
        else if (tok == "r")
            ++rc;
        else
            throw std::runtime_error("wishart word must use tokens 'l' and 'r'");
    }
    if (lc + rc == 0) throw std::runtime_error("wishart-mc: empty word");
    MobiusCache cache;
    const double target = wishart_word_target(lambda, alpha, beta, lc, rc, cache);
    const MomentEstimate e = wishart_word_moment(lambda, alpha, beta, N, seed, lc, rc, samples);
    json doc{{"seed", seed},
             {"lambda", lambda},
             {"alpha", alpha},
             {"beta", beta},
             {"M", wishart_inner_dim(lambda, N)},
             {"rows", json::array({estimateRow(wordStr, N, e, target)})}};
    writeReport(doc, outPath, format, out);
    return 0;
}

int cmdHaarMc(int N, long samples, std::uint64_t seed, const std::string& outPath,
              const std::string& format, std::ostream& out) {
    PairEnsembleSpec spec;
    spec.N = N;
    spec.seed = seed;
    spec.haar = true;

    const SampledWord uu{{SampledLetter::Src::haar, Side::left, 0, "", 0},
                         {SampledLetter::Src::haar_adj, Side::right, 0, "", 0}};
    const SampledWord u1{{SampledLetter::Src::haar, Side::left, 0, "", 0}};
    const SampledWord u2{{SampledLetter::Src::haar, Side::left, 0, "", 0},
                         {SampledLetter::Src::haar, Side::left, 0, "", 0}};
    auto re = estimate_words(spec, {uu, u1, u2}, samples);
    auto im = estimate_words_imag(spec, {uu, u1, u2}, samples);

    json rows = json::array();
    rows.push_back(estimateRow("L(U) R(U*)", N, re[0], 1.0));
    rows.push_back(estimateRow("tr U (re)", N, re[1], 0.0));
    rows.push_back(estimateRow("tr U (im)", N, im[1], 0.0));
    rows.push_back(estimateRow("tr U^2 (re)", N, re[2], 0.0));
    rows.push_back(estimateRow("tr U^2 (im)", N, im[2], 0.0));
    json doc{{"seed", seed}, {"rows", rows}};
    writeReport(doc, outPath, format, out);
    // The twisted pair word evaluates to the identity sample by sample.
    const bool ok = std::abs(re[0].mean - 1.0) < 1e-9 && re[0].stderr_ < 1e-9;
    return ok ? 0 : 1;
}

int cmdQconv(const std::string& wordStr, const std::string& qStr, const std::string& nList,
             const std::string& outPath, const std::string& format, std::ostream& out) {
    const Rational q = qStr.empty() ? Rational(0) : Rational::parse(qStr);
    const auto letters = parse_fock_letters(wordStr);
    const auto Ns = parseIntList(nList);
    if (Ns.size() < 2) throw std::runtime_error("qconv: need at least 2 sizes in --N");
    const Rational target = fock_letter_limit(letters);
    std::vector<std::tuple<int, double, double>> series;
    json rows = json::array();
    for (int N : Ns) {
        const Rational v = word_moment(fock_letter_word(letters, N, q));
        series.emplace_back(N, v.toDouble(), target.toDouble());
        rows.push_back(json{{"N", N},
                            {"value", v.str()},
                            {"target", target.str()},
                            {"abs_error", std::abs(v.toDouble() - target.toDouble())}});
    }
    const ConvergenceReport rep = emit_convergence(series);
    json doc{{"word", wordStr},
             {"q", q.str()},
             {"target", target.str()},
             {"rows", rows},
             {"exact", rep.exact}};
    if (rep.has_slope) doc["loglog_slope"] = rep.slope;
    if (rep.exact) doc["slope"] = "exact";
    if (!outPath.empty()) {
        std::ofstream f(outPath);
        if (!f) throw std::runtime_error("cannot open output path: " + outPath);
        f << rep.csv;
        out << doc.dump(2) << "\n";
    } else {
        writeReport(doc, outPath, format, out);
        out << rep.csv;
    }
    return 0;
}

int cmdBoolean(const std::string& colorsStr, int N, const std::string& outPath,
               const std::string& format, std::ostream& out) {
    BooleanWordSpec spec;
    spec.colors = parseIntList(colorsStr);
    spec.N = N;
    const Rational v = boolean_word_value(spec);
    const Rational lim = boolean_limit(spec.colors);
    json doc{{"colors", spec.colors},
             {"N", N},
             {"value", v.str()},
             {"value_float", v.toDouble()},
             {"closed_form_match", true},
             {"limit", lim.str()}};
    writeReport(doc, outPath, format, out);
    return 0;
}

int cmdMonotone(const std::string& patternStr, int N, const std::string& outPath,
                const std::string& format, std::ostream& out) {
    const MonotonePattern p = MonotonePattern::parse(patternStr);
    const Rational v = monotone_word_value(p, N);
    const Rational lim = monotone_limit(p);
    json doc{{"pattern", p.str()},
             {"N", N},
             {"value", v.str()},
             {"value_float", v.toDouble()},
             {"closed_form_match", true},
             {"limit", lim.str()}};
    writeReport(doc, outPath, format, out);
    return 0;
}

int cmdFockVerify(const std::string& qList, std::ostream& out) {
    const auto results = acceptance::fock_relation_battery(
        qList.empty() ? std::vector<std::string>{"-1", "-1/2", "0", "1/2", "1"}
                      : [&] {
                            std::vector<std::string> qs;
                            std::istringstream in(qList);
                            std::string t;
                            while (std::getline(in, t, ',')) qs.push_back(t);
                            return qs;
                        }());
    bool all = true;
    json rows = json::array();
    for (const auto& r : results) {
        rows.push_back(json{{"relation", r.first}, {"pass", r.second}});
        all = all && r.second;
    }
    out << json{{"rows", rows}, {"pass", all}}.dump(2) << "\n";
    return all ? 0 : 1;
}

int cmdSuite(const std::string& outPath, std::ostream& out) {
    const auto results = acceptance::run_all(&out);
    json rows = json::array();
    bool all = true;
    for (const auto& r : results) {
        rows.push_back(json{{"id", r.id}, {"pass", r.pass}, {"detail", r.detail},
                            {"seconds", r.seconds}});
        all = all && r.pass;
    }
    json doc{{"rows", rows}, {"pass", all}};
    if (!outPath.empty()) writeReport(doc, outPath, "", out);
    return all ? 0 : 1;
}

}  // namespace

ConvergenceReport emit_convergence(const std::vector<std::tuple<int, double, double>>& series) {
    if (series.size() < 2)
        throw std::invalid_argument("emit_convergence: need at least 2 points");
    ConvergenceReport rep;
    std::ostringstream csv;
    csv << "N,value,target,abs_error,error_times_N\n";
    std::vector<std::pair<double, double>> fitPts;
    for (const auto& [N, value, target] : series) {
        const double err = std::abs(value - target);
        csv << N << "," << fmtDouble(value) << "," << fmtDouble(target) << "," << fmtDouble(err)
            << "," << fmtDouble(err * N) << "\n";
        if (err > 0) fitPts.emplace_back(std::log(static_cast<double>(N)), std::log(err));
    }
    rep.csv = csv.str();
    if (fitPts.empty()) {
        rep.exact = true;
        return rep;
    }
    if (fitPts.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [x, y] : fitPts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(fitPts.size());
        const double denom = n * sxx - sx * sx;
        if (std::abs(denom) > 1e-12) {
            rep.slope = (n * sxy - sx * sy) / denom;
            rep.has_slope = true;
        }
    }
    return rep;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"bifree: exact and Monte Carlo computations for bi-matrix models"};
    app.require_subcommand(1);

    std::string chiStr, piStr, sigmaStr, covPath, labels, wordStr, qStr = "0", nList;
    std::string colorsStr, patternStr, poisson, outPath, format, lambdaStr = "1/2", qCsv;
    std::vector<std::string> constDefs, wordList;
    int N = 2;
    long samples = 1000;
    std::uint64_t seed = 1;
    double alpha = 1.0, beta = 1.0;
    bool pairsOnly = false, countOnly = false, full = false;

    auto addOut = [&](CLI::App* cmd) {
        cmd->add_option("--out", outPath, "output path (.csv or .json)");
        cmd->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    };

    auto* pPart = app.add_subcommand("partitions", "enumerate bi-non-crossing partitions");
    pPart->add_option("--chi", chiStr, "side word over {l,r}")->required();
    pPart->add_flag("--pairs", pairsOnly, "pair partitions only");
    pPart->add_flag("--count", countOnly, "emit the count only");
    addOut(pPart);

    auto* pMob = app.add_subcommand("mobius", "Moebius function on a BNC interval");
    pMob->add_option("--chi", chiStr)->required();
    pMob->add_option("--pi", piStr, "JSON blocks, default singletons");
    pMob->add_option("--sigma", sigmaStr, "JSON blocks, default full");
    addOut(pMob);

    auto* pCum = app.add_subcommand("cumulant", "model cumulants");
    pCum->add_option("--chi", chiStr)->required();
    pCum->add_option("--poisson", poisson, "lambda,alpha,beta (rationals)");
    pCum->add_option("--cov", covPath, "covariance JSON for the central-limit model");
    pCum->add_option("--labels", labels, "comma-separated covariance labels");
    addOut(pCum);

    auto* pClt = app.add_subcommand("clt-moment", "central-limit moment from a covariance");
    pClt->add_option("--chi", chiStr)->required();
    pClt->add_option("--cov", covPath)->required();
    pClt->add_option("--labels", labels);
    addOut(pClt);

    auto* pFock = app.add_subcommand("fock-verify", "check the operator relations");
    pFock->add_option("--q", qCsv, "comma-separated rationals, default -1,-1/2,0,1/2,1");

    auto* pWord = app.add_subcommand(
        "word-moment",
        "exact trace state of a matrix word; grammar: L<k>/R<k> creation matrices, "
        "trailing '*' annihilation, 't' infix (Lt1, Rt2*) the transposed-label variants, "
        "C[name]/Cr[name] left/right constants, P0 the averaged vacuum projection");
    pWord->add_option("--word", wordList, "e.g. \"L1* R1 L2 C[a]\"; repeatable for a table")
        ->required();
    pWord->add_option("--N", N, "matrix size")->required();
    pWord->add_option("--q", qStr, "deformation parameter (rational)");
    pWord->add_option("--const", constDefs, "name=JSON or name=@file constant matrices");
    pWord->add_flag("--full", full, "emit the full expectation matrix");
    addOut(pWord);

    auto* pGauss = app.add_subcommand("gauss-mc", "Gaussian pair word estimate");
    pGauss->add_option("--cov", covPath)->required();
    pGauss->add_option("--word", wordStr, "space-separated covariance labels")->required();
    pGauss->add_option("--N", N)->required();
    pGauss->add_option("--samples", samples);
    pGauss->add_option("--seed", seed)->required();
    addOut(pGauss);

    auto* pWish = app.add_subcommand("wishart-mc", "Wishart pair word estimate");
    pWish->add_option("--lambda", lambdaStr, "rate in (0,1), rational");
    pWish->add_option("--alpha", alpha);
    pWish->add_option("--beta", beta);
    pWish->add_option("--N", N)->required();
    pWish->add_option("--samples", samples);
    pWish->add_option("--seed", seed)->required();
    pWish->add_option("--word", wordStr, "tokens l/r, default \"l r\"");
    addOut(pWish);

    auto* pHaar = app.add_subcommand("haar-mc", "Haar pair spot checks");
    pHaar->add_option("--N", N)->required();
    pHaar->add_option("--samples", samples);
    pHaar->add_option("--seed", seed)->required();
    addOut(pHaar);

    auto* pQconv = app.add_subcommand("qconv", "convergence of deformed matrix words");
    pQconv->add_option("--word", wordStr, "L/R letter word")->required();
    pQconv->add_option("--q", qStr, "deformation parameter (rational)");
    pQconv->add_option("--N", nList, "comma-separated sizes")->required();
    addOut(pQconv);

    auto* pBool = app.add_subcommand("boolean", "alternating Boolean-model word");
    pBool->add_option("--colors", colorsStr, "e.g. \"1 1 2 2\"")->required();
    pBool->add_option("--N", N)->required();
    addOut(pBool);

    auto* pMono = app.add_subcommand("monotone", "monotone-model pattern");
    pMono->add_option("--pattern", patternStr, "e.g. \"s2^1 s1^2 s2^1\"")->required();
    pMono->add_option("--N", N)->required();
    addOut(pMono);

    auto* pSuite = app.add_subcommand("suite", "run the full verification battery");
    addOut(pSuite);

    std::vector<const char*> argv;
    argv.push_back("bifree");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    const json cfg = configJson(args);
    g_config = &cfg;

    try {
        if (pPart->parsed()) return cmdPartitions(chiStr, pairsOnly, countOnly, outPath, format, out);
        if (pMob->parsed()) return cmdMobius(chiStr, piStr, sigmaStr, outPath, format, out);
        if (pCum->parsed()) return cmdCumulant(chiStr, poisson, covPath, labels, outPath, format, out);
        if (pClt->parsed()) return cmdCltMoment(chiStr, covPath, labels, outPath, format, out);
        if (pFock->parsed()) return cmdFockVerify(qCsv, out);
        if (pWord->parsed())
            return cmdWordMoment(wordList, N, qStr, constDefs, full, outPath, format, out);
        if (pGauss->parsed())
            return cmdGaussMc(covPath, wordStr, N, samples, seed, outPath, format, out);
        if (pWish->parsed())
            return cmdWishartMc(lambdaStr, alpha, beta, N, samples, seed,
                                wordStr.empty() ? "l r" : wordStr, outPath, format, out);
        if (pHaar->parsed()) return cmdHaarMc(N, samples, seed, outPath, format, out);
        if (pQconv->parsed()) return cmdQconv(wordStr, qStr, nList, outPath, format, out);
        if (pBool->parsed()) return cmdBoolean(colorsStr, N, outPath, format, out);
        if (pMono->parsed()) return cmdMonotone(patternStr, N, outPath, format, out);
        if (pSuite->parsed()) return cmdSuite(outPath, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) {
        err << "internal mismatch: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "unknown subcommand\n";
    return 2;
}

}  // namespace bifree::cli
