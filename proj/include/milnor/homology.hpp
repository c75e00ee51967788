#ifndef MILNOR_HOMOLOGY_HPP
#define MILNOR_HOMOLOGY_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "milnor/rational.hpp"
#include "milnor/sphere_critical.hpp"

namespace milnor {

// Morse indices of the interior critical points of the fibre region, with
// per-point provenance.
struct HandleDecomposition {
    std::vector<int> indices;  // sorted ascending
    int m = 0;
    int ambient_dim = 0;  // n + 1
    std::vector<CriticalPoint> points;

    std::string describe() const;  // e.g. "dPhi u D^1 u D^2"
};

struct HomologyReport {
    std::map<int, long long> ranks;                    // degree -> rank, zero ranks omitted
    std::map<int, std::vector<std::string>> torsion;   // degree -> invariant factors > 1
    long long euler_rel = 0;
    std::vector<std::string> caveats;

    bool torsion_free() const { return torsion.empty(); }
    long long rank(int k) const {
        auto it = ranks.find(k);
        return it == ranks.end() ? 0 : it->second;
    }
};

HandleDecomposition handle_decomposition(const std::vector<CriticalPoint>& points, int ambient_dim);

// rank H_k = #{i : index_i = k} for k >= 1. Index-0 handles fall outside
// the counting hypothesis; they are reported under rank 0 with an explicit
// extrapolation caveat instead of being dropped.
HomologyReport relative_homology(const HandleDecomposition& h);

long long euler_rel(const HandleDecomposition& h);

// --- integer matrices -------------------------------------------------

struct IntMatrix {
    int rows = 0, cols = 0;
    std::vector<BigInt> a;  // row-major

    IntMatrix() = default;
    IntMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}
    static IntMatrix identity(int n);

    BigInt& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const BigInt& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    IntMatrix operator*(const IntMatrix& rhs) const;
    bool operator==(const IntMatrix& rhs) const { return rows == rhs.rows && cols == rhs.cols && a == rhs.a; }
    bool is_zero() const;
};

// U * A * V = D, U and V unimodular, D diagonal with d_i | d_{i+1}.
// The inverses are tracked alongside so that A = Uinv * D * Vinv exactly.
struct SmithResult {
    IntMatrix d, u, v, u_inv, v_inv;
    std::vector<BigInt> invariant_factors;  // nonzero diagonal entries
    int rank = 0;
};

SmithResult smith_normal_form(const IntMatrix& a);

// Invariant factors only (no transform bookkeeping).
std::vector<BigInt> smith_invariant_factors(IntMatrix a);

struct SparseIntMatrix;

// Invariant factors of a sparse matrix: unit-pivot Markowitz elimination
// (each unit pivot splits off a factor 1), dense Smith form on the non-unit
// remainder.
std::vector<BigInt> sparse_invariant_factors(const SparseIntMatrix& m);

// --- chain complexes --------------------------------------------------

struct SparseIntMatrix {
    int rows = 0, cols = 0;
    std::vector<std::vector<std::pair<int, long long>>> col;  // per column: (row, coeff), row-sorted

    SparseIntMatrix() = default;
    SparseIntMatrix(int r, int c) : rows(r), cols(c), col(static_cast<std::size_t>(c)) {}
    void add_entry(int i, int j, long long v) { col[static_cast<std::size_t>(j)].push_back({i, v}); }
    void sort_entries();
    IntMatrix dense() const;
};

struct IllFormedComplexError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// cells[k] counts k-cells; boundary[k] maps C_k -> C_{k-1} (boundary[0] is
// the zero map and stays empty).
struct ChainComplex {
    std::vector<int> cells;
    std::vector<SparseIntMatrix> boundary;

    int top_dimension() const { return static_cast<int>(cells.size()) - 1; }
    void validate() const;  // dimensions composable, D(k-1) * D(k) = 0
};

struct DegreeHomology {
    long long rank = 0;
    std::vector<BigInt> torsion;  // invariant factors > 1
};

// Exact integer homology: reduction/coreduction preprocessing, then Smith
// normal form on the small residual complex.
std::vector<DegreeHomology> chain_homology(const ChainComplex& complex);

}  // namespace milnor

#endif
