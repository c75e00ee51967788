#ifndef MILNOR_POLYNOMIAL_HPP
#define MILNOR_POLYNOMIAL_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "milnor/rational.hpp"

namespace milnor {

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (offset " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using Monomial = std::vector<std::uint32_t>;  // exponent vector, one slot per variable

// Multivariate polynomial with exact rational coefficients over a fixed,
// ordered variable list. Canonical form: no zero coefficients stored, all
// exponent vectors sized to the variable count, terms keyed uniquely.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<std::string> variables) : vars_(std::move(variables)) {}

    static Polynomial zero(std::vector<std::string> variables) { return Polynomial(std::move(variables)); }
    static Polynomial constant(std::vector<std::string> variables, const Rational& c);
    static Polynomial variable(std::vector<std::string> variables, std::size_t index);

    const std::vector<std::string>& variables() const { return vars_; }
    std::size_t num_variables() const { return vars_.size(); }
    const std::map<Monomial, Rational>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_term() const;
    int total_degree() const;

    // Largest |coefficient| as a double; 0 for the zero polynomial.
    double coefficient_scale() const;

    void add_term(const Monomial& m, const Rational& c);

    Polynomial operator+(const Polynomial& rhs) const;
    Polynomial operator-(const Polynomial& rhs) const;
    Polynomial operator*(const Polynomial& rhs) const;
    Polynomial operator-() const;
    Polynomial scaled(const Rational& c) const;
    Polynomial pow(std::uint32_t e) const;

    bool operator==(const Polynomial& rhs) const { return vars_ == rhs.vars_ && terms_ == rhs.terms_; }
    bool operator!=(const Polynomial& rhs) const { return !(*this == rhs); }

    Polynomial derivative(std::size_t var_index) const;

    double evaluate(const Eigen::VectorXd& point) const;

    std::string str() const;

  private:
    void check_compatible(const Polynomial& rhs) const;

    std::vector<std::string> vars_;
    std::map<Monomial, Rational> terms_;
};

struct PolyVector {
    std::vector<Polynomial> entries;

    Eigen::VectorXd evaluate(const Eigen::VectorXd& point) const;
};

struct PolyMatrix {
    std::vector<std::vector<Polynomial>> entries;

    Eigen::MatrixXd evaluate(const Eigen::VectorXd& point) const;
};

// Grammar (documented in docs/grammar.md):
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := base ('^' uint)?
//   base   := rational | ident | '(' expr ')'
// Implicit multiplication is not accepted; exponents are non-negative
// integer literals only.
Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& variables);

double evaluate(const Polynomial& p, const Eigen::VectorXd& point);
PolyVector gradient(const Polynomial& p);
PolyMatrix hessian(const Polynomial& p);

// f - sum_i t_i x_i, exact. Double entries are converted exactly (dyadic).
Polynomial perturb(const Polynomial& f, const std::vector<Rational>& t);
Polynomial perturb(const Polynomial& f, const Eigen::VectorXd& t);

// Flattened double-coefficient view for hot evaluation loops.
class CompiledPoly {
  public:
    CompiledPoly() = default;
    explicit CompiledPoly(const Polynomial& p);

    double operator()(const double* point) const;
    double operator()(const Eigen::VectorXd& point) const { return (*this)(point.data()); }
    int dimension() const { return dim_; }

  private:
    struct Term {
        double coeff;
        std::vector<std::uint32_t> exps;
    };
    std::vector<Term> terms_;
    int dim_ = 0;
};

// Compiled gradient/Hessian bundle for Newton loops.
class CompiledSystem {
  public:
    CompiledSystem() = default;
    explicit CompiledSystem(const Polynomial& p);

    int dimension() const { return dim_; }
    double value(const Eigen::VectorXd& x) const { return value_(x); }
    Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd hess(const Eigen::VectorXd& x) const;

  private:
    int dim_ = 0;
    CompiledPoly value_;
    std::vector<CompiledPoly> grad_;
    std::vector<std::vector<CompiledPoly>> hess_;  // upper triangle
};

}  // namespace milnor

#endif
