#include "milnor/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace milnor {

Polynomial Polynomial::constant(std::vector<std::string> variables, const Rational& c) {
    Polynomial p(std::move(variables));
    if (c != 0) p.terms_[Monomial(p.vars_.size(), 0)] = c;
    return p;
}

Polynomial Polynomial::variable(std::vector<std::string> variables, std::size_t index) {
    Polynomial p(std::move(variables));
    if (index >= p.vars_.size()) throw DimensionError("variable index out of range");
    Monomial m(p.vars_.size(), 0);
    m[index] = 1;
    p.terms_[m] = 1;
    return p;
}

bool Polynomial::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    const Monomial& m = terms_.begin()->first;
    return std::all_of(m.begin(), m.end(), [](std::uint32_t e) { return e == 0; });
}

Rational Polynomial::constant_term() const {
    auto it = terms_.find(Monomial(vars_.size(), 0));
    return it == terms_.end() ? Rational(0) : it->second;
}

int Polynomial::total_degree() const {
    int deg = 0;
    for (const auto& [m, c] : terms_) {
        int d = 0;
        for (auto e : m) d += static_cast<int>(e);
        deg = std::max(deg, d);
    }
    return deg;
}

double Polynomial::coefficient_scale() const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) s = std::max(s, std::abs(to_double(c)));
    return s;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
    if (m.size() != vars_.size()) throw DimensionError("exponent vector length mismatch");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void Polynomial::check_compatible(const Polynomial& rhs) const {
    if (vars_ != rhs.vars_) throw DimensionError("polynomials over different variable lists");
}

Polynomial Polynomial::operator+(const Polynomial& rhs) const {
    check_compatible(rhs);
    Polynomial out = *this;
    for (const auto& [m, c] : rhs.terms_) out.add_term(m, c);
    return out;
}

Polynomial Polynomial::operator-(const Polynomial& rhs) const {
    check_compatible(rhs);
    Polynomial out = *this;
    for (const auto& [m, c] : rhs.terms_) out.add_term(m, -c);
    return out;
}

Polynomial Polynomial::operator-() const {
    Polynomial out(vars_);
    for (const auto& [m, c] : terms_) out.terms_[m] = -c;
    return out;
}

Polynomial Polynomial::scaled(const Rational& c) const {
    Polynomial out(vars_);
    if (c == 0) return out;
    for (const auto& [m, k] : terms_) out.terms_[m] = k * c;
    return out;
}

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
    check_compatible(rhs);
    Polynomial out(vars_);
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : rhs.terms_) {
            Monomial m(ma.size());
            for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
            out.add_term(m, ca * cb);
        }
    }
    return out;
}

Polynomial Polynomial::pow(std::uint32_t e) const {
    Polynomial out = Polynomial::constant(vars_, 1);
    Polynomial base = *this;
    while (e > 0) {
        if (e & 1u) out = out * base;
        base = base * base;
        e >>= 1;
    }
    return out;
}

Polynomial Polynomial::derivative(std::size_t var_index) const {
    if (var_index >= vars_.size()) throw DimensionError("derivative index out of range");
    Polynomial out(vars_);
    for (const auto& [m, c] : terms_) {
        if (m[var_index] == 0) continue;
        Monomial d = m;
        d[var_index] -= 1;
        out.add_term(d, c * Rational(m[var_index]));
    }
    return out;
}

namespace {

double powi(double x, std::uint32_t e) {
    double r = 1.0;
    while (e > 0) {
        if (e & 1u) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

}  // namespace

double Polynomial::evaluate(const Eigen::VectorXd& point) const {
    if (static_cast<std::size_t>(point.size()) != vars_.size())
        throw DimensionError("evaluation point dimension mismatch");
    double acc = 0.0;
    for (const auto& [m, c] : terms_) {
        double t = to_double(c);
        for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i]) t *= powi(point[static_cast<Eigen::Index>(i)], m[i]);
        acc += t;
    }
    return acc;
}

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    // Reverse map order: lexicographically largest exponent vector first,
    // so "x^3 - y^2" prints in the familiar shape.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        Rational mag = c < 0 ? Rational(-c) : c;
        if (first) {
            if (c < 0) out << "-";
            first = false;
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        bool has_var = std::any_of(m.begin(), m.end(), [](std::uint32_t e) { return e != 0; });
        bool printed = false;
        if (!has_var || mag != 1) {
            out << rational_to_string(mag);
            printed = true;
        }
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (printed) out << "*";
            out << vars_[i];
            if (m[i] > 1) out << "^" << m[i];
            printed = true;
        }
    }
    return out.str();
}

Eigen::VectorXd PolyVector::evaluate(const Eigen::VectorXd& point) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) v[static_cast<Eigen::Index>(i)] = entries[i].evaluate(point);
    return v;
}

Eigen::MatrixXd PolyMatrix::evaluate(const Eigen::VectorXd& point) const {
    Eigen::Index n = static_cast<Eigen::Index>(entries.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].evaluate(point);
    return m;
}

namespace {

class Parser {
  public:
    Parser(const std::string& text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

    Polynomial run() {
        Polynomial p = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return p;
    }

  private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Polynomial parse_expr() {
        bool negate = false;
        skip_ws();
        if (eat('+')) {
        } else if (eat('-')) {
            negate = true;
        }
        Polynomial acc = parse_term();
        if (negate) acc = -acc;
        for (;;) {
            if (eat('+')) {
                acc = acc + parse_term();
            } else if (eat('-')) {
                acc = acc - parse_term();
            } else {
                break;
            }
        }
        return acc;
    }

    Polynomial parse_term() {
        Polynomial acc = parse_factor();
        while (eat('*')) acc = acc * parse_factor();
        return acc;
    }

    Polynomial parse_factor() {
        Polynomial base = parse_base();
        if (eat('^')) {
            skip_ws();
            std::size_t at = pos_;
            if (at >= text_.size()) throw ParseError("expected exponent", pos_);
            char c = text_[at];
            if (c == '-' || c == '+') throw ParseError("exponent must be a non-negative integer literal", at);
            if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("expected exponent", at);
            std::uint64_t e = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                e = e * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
                if (e > 1u << 20) throw ParseError("exponent too large", at);
                ++pos_;
            }
            if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == '/'))
                throw ParseError("exponent must be a non-negative integer literal", pos_);
            return base.pow(static_cast<std::uint32_t>(e));
        }
        return base;
    }

    Polynomial parse_base() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial inner = parse_expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Polynomial parse_number() {
        std::size_t start = pos_;
        auto digits = [&]() {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
            return n;
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            if (digits() == 0) throw ParseError("expected digits after '.'", pos_);
        } else if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            if (digits() == 0) throw ParseError("expected denominator digits", pos_);
        }
        return Polynomial::constant(vars_, rational_from_string(text_.substr(start, pos_ - start)));
    }

    Polynomial parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it == vars_.end()) throw ParseError("unknown identifier '" + name + "'", start);
        return Polynomial::variable(vars_, static_cast<std::size_t>(it - vars_.begin()));
    }

    const std::string& text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& variables) {
    return Parser(text, variables).run();
}

double evaluate(const Polynomial& p, const Eigen::VectorXd& point) { return p.evaluate(point); }

PolyVector gradient(const Polynomial& p) {
    PolyVector g;
    g.entries.reserve(p.num_variables());
    for (std::size_t i = 0; i < p.num_variables(); ++i) g.entries.push_back(p.derivative(i));
    return g;
}

PolyMatrix hessian(const Polynomial& p) {
    std::size_t n = p.num_variables();
    PolyMatrix h;
    h.entries.assign(n, std::vector<Polynomial>(n, Polynomial(p.variables())));
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial di = p.derivative(i);
        for (std::size_t j = i; j < n; ++j) {
            Polynomial dij = di.derivative(j);
            h.entries[i][j] = dij;
            h.entries[j][i] = dij;
        }
    }
    return h;
}

Polynomial perturb(const Polynomial& f, const std::vector<Rational>& t) {
    if (t.size() != f.num_variables()) throw DimensionError("perturbation vector length mismatch");
    Polynomial out = f;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == 0) continue;
        Monomial m(t.size(), 0);
        m[i] = 1;
        out.add_term(m, -t[i]);
    }
    return out;
}

Polynomial perturb(const Polynomial& f, const Eigen::VectorXd& t) {
    std::vector<Rational> rt(static_cast<std::size_t>(t.size()));
    for (Eigen::Index i = 0; i < t.size(); ++i) rt[static_cast<std::size_t>(i)] = rational_from_double(t[i]);
    return perturb(f, rt);
}

CompiledPoly::CompiledPoly(const Polynomial& p) : dim_(static_cast<int>(p.num_variables())) {
    terms_.reserve(p.terms().size());
    for (const auto& [m, c] : p.terms()) terms_.push_back({to_double(c), m});
}

double CompiledPoly::operator()(const double* point) const {
    double acc = 0.0;
    for (const auto& t : terms_) {
        double v = t.coeff;
        for (std::size_t i = 0; i < t.exps.size(); ++i) {
            std::uint32_t e = t.exps[i];
            double x = point[i];
            while (e > 0) {
                if (e & 1u) v *= x;
                x *= x;
                e >>= 1;
            }
        }
        acc += v;
    }
    return acc;
}

CompiledSystem::CompiledSystem(const Polynomial& p) : dim_(static_cast<int>(p.num_variables())) {
    value_ = CompiledPoly(p);
    grad_.reserve(static_cast<std::size_t>(dim_));
    std::vector<Polynomial> partials;
    for (int i = 0; i < dim_; ++i) {
        partials.push_back(p.derivative(static_cast<std::size_t>(i)));
        grad_.emplace_back(partials.back());
    }
    hess_.resize(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j)
            hess_[static_cast<std::size_t>(i)].emplace_back(partials[static_cast<std::size_t>(i)].derivative(static_cast<std::size_t>(j)));
}

Eigen::VectorXd CompiledSystem::grad(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g(dim_);
    for (int i = 0; i < dim_; ++i) g[i] = grad_[static_cast<std::size_t>(i)](x);
    return g;
}

Eigen::MatrixXd CompiledSystem::hess(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd h(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) {
            double v = hess_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i)](x);
            h(i, j) = v;
            h(j, i) = v;
        }
    return h;
}

}  // namespace milnor
