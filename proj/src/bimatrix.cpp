#include "bifree/bimatrix.hpp"

#include <sstream>
#include <stdexcept>

namespace bifree {

MatrixState MatrixState::identityVacuum(int n, int depth_cap) {
    MatrixState s(n, depth_cap);
    for (int i = 1; i <= n; ++i) s.at(i, i) = FockVector::vacuum(depth_cap);
    return s;
}

void MatrixState::cellsSubtract(const MatrixState& o) {
    if (N != o.N) throw std::invalid_argument("cellsSubtract: dimension mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i)
        cells[i].addScaled(o.cells[i], Rational(-1));
}

bool MatrixState::operator==(const MatrixState& o) const {
    if (N != o.N) return false;
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (!(cells[i] == o.cells[i])) return false;
    return true;
}

MatrixState act(const OperatorMatrix& m, const MatrixState& state) {
    if (m.N != state.N) throw std::invalid_argument("act: dimension mismatch");
    const int n = m.N;
    const int cap = state.cells.empty() ? 0 : state.cells.front().depthCap();
    MatrixState out(n, cap);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            FockVector& cell = out.at(i, j);
            for (int k = 1; k <= n; ++k) {
                const OperatorEntry& entry = (m.side == Side::left) ? m.at(i, k) : m.at(k, j);
                if (entry.isZero()) continue;
                const FockVector& src = (m.side == Side::left) ? state.at(k, j) : state.at(i, k);
                if (src.isZero()) continue;
                entry.applyInto(src, cell);
            }
        }
    }
    return out;
}

MatrixState apply_vacuum_projection(const MatrixState& state) {
    const int n = state.N;
    const int cap = state.cells.empty() ? 0 : state.cells.front().depthCap();
    Rational w(0);
    for (int y = 1; y <= n; ++y) w += state.at(y, y).vacuumWeight();
    w /= Rational(n);
    MatrixState out(n, cap);
    for (int i = 1; i <= n; ++i) out.at(i, i).add(TensorWord{}, w);
    return out;
}

MatrixState apply_word_to_identity(const MatrixWord& word) {
    int n = 0;
    Rational q(0);
    bool haveMatrix = false;
    int cap = 0;
    for (const auto& atom : word) {
        if (const auto* m = std::get_if<OperatorMatrix>(&atom)) {
            if (!haveMatrix) {
                n = m->N;
                q = m->q;
                haveMatrix = true;
            } else {
                if (m->N != n) throw std::invalid_argument("word: mixed matrix sizes");
                if (m->q != q) throw std::invalid_argument("word: mixed q parameters");
            }
            cap += m->maxCreationsPerApply();
        }
    }
    if (!haveMatrix) throw std::invalid_argument("word: needs at least one matrix");
    MatrixState state = MatrixState::identityVacuum(n, cap);
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        if (const auto* m = std::get_if<OperatorMatrix>(&*it)) {
            state = act(*m, state);
        } else {
            state = apply_vacuum_projection(state);
        }
    }
    return state;
}

RationalMatrix expectation(const MatrixState& state) {
    RationalMatrix out(state.N);
    for (int i = 1; i <= state.N; ++i)
        for (int j = 1; j <= state.N; ++j) out.at(i, j) = state.at(i, j).vacuumWeight();
    return out;
}

namespace {

int totalNormExp(const MatrixWord& word) {
    int h = 0;
    for (const auto& atom : word)
        if (const auto* m = std::get_if<OperatorMatrix>(&atom)) h += m->norm_exp;
    return h;
}

bool isZeroMatrix(const RationalMatrix& m) {
    for (const auto& v : m.a)
        if (!v.isZero()) return false;
    return true;
}

}  // namespace

RationalMatrix word_expectation(const MatrixWord& word) {
    RationalMatrix raw = expectation(apply_word_to_identity(word));
    const int h = totalNormExp(word);
    if (h % 2 != 0) {
        if (!isZeroMatrix(raw))
            throw std::logic_error(
                "word_expectation: odd normalization exponent with nonzero value");
        return raw;
    }
    std::int64_t scale = 1;
    for (int t = 0; t < h / 2; ++t) scale *= raw.N;
    const Rational factor(1, scale);
    for (auto& v : raw.a) v *= factor;
    return raw;
}

Rational word_moment(const MatrixWord& word) {
    RationalMatrix e = word_expectation(word);
    return e.trace() / Rational(e.N);
}

OperatorMatrix build_fock_matrix(Side side, Variant variant, int k, int N, Rational q) {
    if (N < 1) throw std::invalid_argument("build_fock_matrix: N must be positive");
    OperatorMatrix m(N, side, q);
    m.norm_exp = 1;
    const bool annihilates = (variant == Variant::star || variant == Variant::tstar);
    const bool transposed = (variant == Variant::t || variant == Variant::star);
    for (int i = 1; i <= N; ++i) {
        for (int j = 1; j <= N; ++j) {
            const Label h = transposed ? entry_label(j, i, k) : entry_label(i, j, k);
            FockOp op;
            if (side == Side::left)
                op = annihilates ? FockOp::annihilateLeft(h, q) : FockOp::createLeft(h, q);
            else
                op = annihilates ? FockOp::annihilateRight(h, q) : FockOp::createRight(h, q);
            m.at(i, j) = OperatorEntry::single(op);
        }
    }
    return m;
}

OperatorMatrix constant_matrix(Side side, const RationalMatrix& values, Rational q,
                               std::string name) {
    OperatorMatrix m(values.N, side, std::move(q));
    m.norm_exp = 0;
    m.name = std::move(name);
    for (int i = 1; i <= values.N; ++i)
        for (int j = 1; j <= values.N; ++j) m.at(i, j) = OperatorEntry::scalar(values.at(i, j));
    return m;
}

std::pair<OperatorMatrix, OperatorMatrix> build_boolean_matrices(int k, int N) {
    if (N < 2) throw std::invalid_argument("build_boolean_matrices: N must be at least 2");
    const Rational q(0);
    const Label h = indexed_label(1, k);
    OperatorMatrix t(N, Side::left, q);
    for (int j = 1; j <= N - 1; ++j) {
        t.at(j, j + 1) = (j % 2 == 1) ? OperatorEntry::single(FockOp::annihilateLeft(h, q))
                                      : OperatorEntry::single(FockOp::createLeft(h, q));
    }
    // Shift with ones on the subdiagonal (j, j-1), j = 2..N.
    OperatorMatrix s(N, Side::right, q);
    for (int j = 2; j <= N; ++j) s.at(j, j - 1) = OperatorEntry::scalar(Rational(1));
    return {std::move(t), std::move(s)};
}

MonotoneMatrices build_monotone_matrices(int N) {
    if (N < 2) throw std::invalid_argument("build_monotone_matrices: N must be at least 2");
    const Rational q(0);
    const Label h0 = named_label(0);
    MonotoneMatrices out{OperatorMatrix(N, Side::left, q), OperatorMatrix(N, Side::right, q),
                         OperatorMatrix(N, Side::left, q)};
    for (int j = 1; j <= N - 1; ++j) {
        OperatorEntry s0;
        s0.add(Rational(1), {FockOp::createLeft(h0, q)});
        s0.add(Rational(1), {FockOp::annihilateLeft(h0, q)});
        out.t1.at(j + 1, j) = std::move(s0);
        out.s1.at(j, j + 1) = OperatorEntry::scalar(Rational(1));
    }
    for (int x = 1; x <= N; ++x) {
        const Label hx = named_label(x);
        OperatorEntry sx;
        sx.add(Rational(1), {FockOp::createLeft(hx, q)});
        sx.add(Rational(1), {FockOp::annihilateLeft(hx, q)});
        out.t2.at(x, x) = std::move(sx);
    }
    return out;
}

RationalMatrix matrix_unit_word(const ChiMap& chi, const std::vector<int>& i,
                                const std::vector<int>& j, int N) {
    const int n = chi.size();
    if (static_cast<int>(i.size()) != n || static_cast<int>(j.size()) != n)
        throw std::invalid_argument("matrix_unit_word: index length mismatch");
    RationalMatrix out = RationalMatrix::identity(N);
    for (int pos : chi.sChi()) {
        RationalMatrix unit(N);
        unit.at(i[pos - 1], j[pos - 1]) = Rational(1);
        out = out * unit;
    }
    return out;
}

MatrixWord parse_matrix_word(const std::string& text, int N, const Rational& q,
                             const std::map<std::string, RationalMatrix>& constants) {
    MatrixWord word;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        if (tok == "P0") {
            word.emplace_back(VacuumProjectionAtom{});
            continue;
        }
        if (tok[0] == 'C') {
            // C[name] is a left constant, Cr[name] a right constant.
            Side side = Side::left;
            std::size_t open = tok.find('[');
            if (open == std::string::npos || tok.back() != ']')
                throw std::invalid_argument("bad constant token: " + tok);
            if (tok.compare(0, open, "Cr") == 0)
                side = Side::right;
            else if (tok.compare(0, open, "C") != 0 && tok.compare(0, open, "Cl") != 0)
                throw std::invalid_argument("bad constant token: " + tok);
            const std::string name = tok.substr(open + 1, tok.size() - open - 2);
            auto it = constants.find(name);
            if (it == constants.end())
                throw std::invalid_argument("unknown constant matrix: " + name);
            if (it->second.N != N)
                throw std::invalid_argument("constant matrix size mismatch: " + name);
            word.emplace_back(constant_matrix(side, it->second, q, name));
            continue;
        }
        Side side;
        if (tok[0] == 'L')
            side = Side::left;
        else if (tok[0] == 'R')
            side = Side::right;
        else
            throw std::invalid_argument("bad word token: " + tok);
        std::size_t pos = 1;
        bool transposed = false;
        if (pos < tok.size() && tok[pos] == 't') {
            transposed = true;
            ++pos;
        }
        std::size_t digits = 0;
        int k = 0;
        while (pos + digits < tok.size() && std::isdigit(static_cast<unsigned char>(tok[pos + digits]))) {
            k = k * 10 + (tok[pos + digits] - '0');
            ++digits;
        }
        if (digits == 0) throw std::invalid_argument("bad word token: " + tok);
        pos += digits;
        bool star = false;
        if (pos < tok.size() && tok[pos] == '*') {
            star = true;
            ++pos;
        }
        if (pos != tok.size()) throw std::invalid_argument("bad word token: " + tok);
        Variant v = transposed ? (star ? Variant::tstar : Variant::t)
                               : (star ? Variant::star : Variant::plain);
        word.emplace_back(build_fock_matrix(side, v, k, N, q));
    }
    if (word.empty()) throw std::invalid_argument("empty word");
    return word;
}

std::string FockLetter::str() const {
    std::string s(1, side == Side::left ? 'L' : 'R');
    if (variant == Variant::t || variant == Variant::tstar) s += 't';
    s += std::to_string(k);
    if (variant == Variant::star || variant == Variant::tstar) s += '*';
    return s;
}

std::vector<FockLetter> parse_fock_letters(const std::string& text) {
    std::vector<FockLetter> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        FockLetter l;
        if (tok[0] == 'L')
            l.side = Side::left;
        else if (tok[0] == 'R')
            l.side = Side::right;
        else
            throw std::invalid_argument("bad letter token: " + tok);
        std::size_t pos = 1;
        bool transposed = false;
        if (pos < tok.size() && tok[pos] == 't') {
            transposed = true;
            ++pos;
        }
        std::size_t digits = 0;
        int k = 0;
        while (pos + digits < tok.size() &&
               std::isdigit(static_cast<unsigned char>(tok[pos + digits]))) {
            k = k * 10 + (tok[pos + digits] - '0');
            ++digits;
        }
        if (digits == 0) throw std::invalid_argument("bad letter token: " + tok);
        pos += digits;
        bool star = false;
        if (pos < tok.size() && tok[pos] == '*') {
            star = true;
            ++pos;
        }
        if (pos != tok.size()) throw std::invalid_argument("bad letter token: " + tok);
        l.k = k;
        l.variant = transposed ? (star ? Variant::tstar : Variant::t)
                               : (star ? Variant::star : Variant::plain);
        out.push_back(l);
    }
    if (out.empty()) throw std::invalid_argument("empty letter word");
    return out;
}

MatrixWord fock_letter_word(const std::vector<FockLetter>& letters, int N, const Rational& q) {
    MatrixWord word;
    word.reserve(letters.size());
    for (const auto& l : letters)
        word.emplace_back(build_fock_matrix(l.side, l.variant, l.k, N, q));
    return word;
}

Rational fock_letter_limit(const std::vector<FockLetter>& letters) {
    const Rational q0(0);
    std::vector<FockOp> ops;
    ops.reserve(letters.size());
    for (const auto& l : letters) {
        const bool transposed = (l.variant == Variant::t || l.variant == Variant::tstar);
        const bool annihilates = (l.variant == Variant::star || l.variant == Variant::tstar);
        const Label h = named_label((static_cast<std::uint64_t>(l.k) << 1) | (transposed ? 1 : 0));
        if (l.side == Side::left)
            ops.push_back(annihilates ? FockOp::annihilateLeft(h, q0) : FockOp::createLeft(h, q0));
        else
            ops.push_back(annihilates ? FockOp::annihilateRight(h, q0)
                                      : FockOp::createRight(h, q0));
    }
    return vacuum_expectation(ops);
}

}  // namespace bifree
