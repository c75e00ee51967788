#include "milnor/homology.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <numeric>
#include <sstream>

namespace milnor {

HandleDecomposition handle_decomposition(const std::vector<CriticalPoint>& points, int ambient_dim) {
    HandleDecomposition h;
    h.ambient_dim = ambient_dim;
    h.points = points;
    for (const auto& p : points) h.indices.push_back(p.morse_index);
    std::sort(h.indices.begin(), h.indices.end());
    h.m = static_cast<int>(h.indices.size());
    return h;
}

std::string HandleDecomposition::describe() const {
    std::string s = "dPhi";
    for (int idx : indices) s += " u D^" + std::to_string(idx);
    return s;
}

HomologyReport relative_homology(const HandleDecomposition& h) {
    HomologyReport report;
    long long zero_handles = 0;
    for (int idx : h.indices) {
        if (idx >= 1) {
            report.ranks[idx] += 1;
        } else {
            ++zero_handles;
        }
    }
    if (zero_handles > 0) {
        report.ranks[0] = zero_handles;
        report.caveats.push_back("index0_extrapolation");
    }
    report.euler_rel = euler_rel(h);
    return report;
}

long long euler_rel(const HandleDecomposition& h) {
    long long e = 0;
    for (int idx : h.indices) e += (idx % 2 == 0) ? 1 : -1;
    return e;
}

// --- integer matrices -------------------------------------------------

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
    if (cols != rhs.rows) throw std::invalid_argument("matrix shape mismatch");
    IntMatrix out(rows, rhs.cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) {
            const BigInt& aik = at(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < rhs.cols; ++j) {
                const BigInt& bkj = rhs.at(k, j);
                if (bkj != 0) out.at(i, j) += aik * bkj;
            }
        }
    return out;
}

bool IntMatrix::is_zero() const {
    return std::all_of(a.begin(), a.end(), [](const BigInt& x) { return x == 0; });
}

namespace {

// Shared Smith elimination; transform tracking optional.
struct SmithWorker {
    IntMatrix d;
    bool track;
    IntMatrix u, v, u_inv, v_inv;

    explicit SmithWorker(IntMatrix a, bool track_transforms) : d(std::move(a)), track(track_transforms) {
        if (track) {
            u = IntMatrix::identity(d.rows);
            u_inv = IntMatrix::identity(d.rows);
            v = IntMatrix::identity(d.cols);
            v_inv = IntMatrix::identity(d.cols);
        }
    }

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int c = 0; c < d.cols; ++c) std::swap(d.at(i, c), d.at(j, c));
        if (!track) return;
        for (int c = 0; c < u.cols; ++c) std::swap(u.at(i, c), u.at(j, c));
        for (int r = 0; r < u_inv.rows; ++r) std::swap(u_inv.at(r, i), u_inv.at(r, j));
    }

    void swap_cols(int i, int j) {
        if (i == j) return;
        for (int r = 0; r < d.rows; ++r) std::swap(d.at(r, i), d.at(r, j));
        if (!track) return;
        for (int r = 0; r < v.rows; ++r) std::swap(v.at(r, i), v.at(r, j));
        for (int c = 0; c < v_inv.cols; ++c) std::swap(v_inv.at(i, c), v_inv.at(j, c));
    }

    void negate_row(int i) {
        for (int c = 0; c < d.cols; ++c) d.at(i, c) = -d.at(i, c);
        if (!track) return;
        for (int c = 0; c < u.cols; ++c) u.at(i, c) = -u.at(i, c);
        for (int r = 0; r < u_inv.rows; ++r) u_inv.at(r, i) = -u_inv.at(r, i);
    }

    // row_i -= q * row_j
    void row_axpy(int i, int j, const BigInt& q) {
        if (q == 0) return;
        for (int c = 0; c < d.cols; ++c)
            if (d.at(j, c) != 0) d.at(i, c) -= q * d.at(j, c);
        if (!track) return;
        for (int c = 0; c < u.cols; ++c)
            if (u.at(j, c) != 0) u.at(i, c) -= q * u.at(j, c);
        // inverse op on Uinv columns: col_j += q * col_i
        for (int r = 0; r < u_inv.rows; ++r)
            if (u_inv.at(r, i) != 0) u_inv.at(r, j) += q * u_inv.at(r, i);
    }

    // col_i -= q * col_j
    void col_axpy(int i, int j, const BigInt& q) {
        if (q == 0) return;
        for (int r = 0; r < d.rows; ++r)
            if (d.at(r, j) != 0) d.at(r, i) -= q * d.at(r, j);
        if (!track) return;
        for (int r = 0; r < v.rows; ++r)
            if (v.at(r, j) != 0) v.at(r, i) -= q * v.at(r, j);
        for (int c = 0; c < v_inv.cols; ++c)
            if (v_inv.at(i, c) != 0) v_inv.at(j, c) += q * v_inv.at(i, c);
    }

    bool find_pivot(int t, int& pi, int& pj) const {
        bool found = false;
        BigInt best;
        for (int i = t; i < d.rows; ++i)
            for (int j = t; j < d.cols; ++j) {
                const BigInt& x = d.at(i, j);
                if (x == 0) continue;
                BigInt ax = abs(x);
                if (!found || ax < best) {
                    best = ax;
                    pi = i;
                    pj = j;
                    found = true;
                }
            }
        return found;
    }

    void run() {
        const int n = std::min(d.rows, d.cols);
        for (int t = 0; t < n; ++t) {
            int pi, pj;
            if (!find_pivot(t, pi, pj)) break;
            swap_rows(t, pi);
            swap_cols(t, pj);
            for (;;) {
                // Clear column t below the pivot, re-pivoting on remainders.
                bool again = false;
                for (int i = t + 1; i < d.rows; ++i) {
                    if (d.at(i, t) == 0) continue;
                    BigInt q = d.at(i, t) / d.at(t, t);
                    row_axpy(i, t, q);
                    if (d.at(i, t) != 0) {
                        swap_rows(t, i);  // smaller remainder becomes the pivot
                        again = true;
                    }
                }
                for (int j = t + 1; j < d.cols; ++j) {
                    if (d.at(t, j) == 0) continue;
                    BigInt q = d.at(t, j) / d.at(t, t);
                    col_axpy(j, t, q);
                    if (d.at(t, j) != 0) {
                        swap_cols(t, j);
                        again = true;
                    }
                }
                if (again) continue;
                // Pivot divides its row and column (both now clear). Enforce
                // divisibility of the remaining block.
                bool fixed = true;
                for (int i = t + 1; i < d.rows && fixed; ++i)
                    for (int j = t + 1; j < d.cols && fixed; ++j)
                        if (d.at(i, j) % d.at(t, t) != 0) {
                            row_axpy(t, i, BigInt(-1));  // row_t += row_i
                            fixed = false;
                        }
                if (fixed) break;
            }
            if (d.at(t, t) < 0) negate_row(t);
        }
    }
};

}  // namespace

SmithResult smith_normal_form(const IntMatrix& a) {
    SmithWorker w(a, true);
    w.run();
    SmithResult res;
    res.d = std::move(w.d);
    res.u = std::move(w.u);
    res.v = std::move(w.v);
    res.u_inv = std::move(w.u_inv);
    res.v_inv = std::move(w.v_inv);
    for (int t = 0; t < std::min(res.d.rows, res.d.cols); ++t)
        if (res.d.at(t, t) != 0) res.invariant_factors.push_back(res.d.at(t, t));
    res.rank = static_cast<int>(res.invariant_factors.size());
    return res;
}

std::vector<BigInt> smith_invariant_factors(IntMatrix a) {
    SmithWorker w(std::move(a), false);
    w.run();
    std::vector<BigInt> factors;
    for (int t = 0; t < std::min(w.d.rows, w.d.cols); ++t)
        if (w.d.at(t, t) != 0) factors.push_back(w.d.at(t, t));
    return factors;
}

namespace {

// Unit-pivot sparse elimination. Rows live in ordered maps with a parallel
// column index; arithmetic is checked int64 and falls back to the dense
// big-integer path on overflow.
struct SparseEliminator {
    std::vector<std::map<int, long long>> rows;
    std::vector<std::set<int>> col_rows;  // rows with a nonzero in each column
    std::vector<char> row_alive, col_alive;
    long long unit_pivots = 0;

    explicit SparseEliminator(const SparseIntMatrix& m)
        : rows(static_cast<std::size_t>(m.rows)),
          col_rows(static_cast<std::size_t>(m.cols)),
          row_alive(static_cast<std::size_t>(m.rows), 1),
          col_alive(static_cast<std::size_t>(m.cols), 1) {
        for (int j = 0; j < m.cols; ++j)
            for (const auto& [i, v] : m.col[static_cast<std::size_t>(j)]) {
                if (v == 0) continue;
                auto [it, fresh] = rows[static_cast<std::size_t>(i)].emplace(j, v);
                if (!fresh) {
                    it->second += v;
                    if (it->second == 0) {
                        rows[static_cast<std::size_t>(i)].erase(it);
                        continue;
                    }
                }
                col_rows[static_cast<std::size_t>(j)].insert(i);
            }
        for (int j = 0; j < m.cols; ++j)
            for (auto it = col_rows[static_cast<std::size_t>(j)].begin(); it != col_rows[static_cast<std::size_t>(j)].end();) {
                if (rows[static_cast<std::size_t>(*it)].count(j) == 0)
                    it = col_rows[static_cast<std::size_t>(j)].erase(it);
                else
                    ++it;
            }
    }

    bool find_unit_pivot(int& pi, int& pj) const {
        long long best_score = -1;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!row_alive[i]) continue;
            for (const auto& [j, v] : rows[i]) {
                if (!col_alive[static_cast<std::size_t>(j)]) continue;
                if (v != 1 && v != -1) continue;
                long long score = static_cast<long long>(rows[i].size() - 1) *
                                  static_cast<long long>(col_rows[static_cast<std::size_t>(j)].size() - 1);
                if (best_score < 0 || score < best_score) {
                    best_score = score;
                    pi = static_cast<int>(i);
                    pj = j;
                    if (score == 0) return true;
                }
            }
        }
        return best_score >= 0;
    }

    void set_entry(int i, int j, long long v) {
        auto& row = rows[static_cast<std::size_t>(i)];
        if (v == 0) {
            row.erase(j);
            col_rows[static_cast<std::size_t>(j)].erase(i);
        } else {
            row[j] = v;
            col_rows[static_cast<std::size_t>(j)].insert(i);
        }
    }

    // row_r -= c * row_p  (columns still alive only)
    void row_axpy(int r, int p, long long c) {
        for (const auto& [j, v] : rows[static_cast<std::size_t>(p)]) {
            if (!col_alive[static_cast<std::size_t>(j)]) continue;
            long long delta, cur = 0;
            auto it = rows[static_cast<std::size_t>(r)].find(j);
            if (it != rows[static_cast<std::size_t>(r)].end()) cur = it->second;
            if (__builtin_mul_overflow(c, v, &delta))
                throw std::overflow_error("sparse elimination overflow");
            long long next;
            if (__builtin_sub_overflow(cur, delta, &next))
                throw std::overflow_error("sparse elimination overflow");
            set_entry(r, j, next);
        }
    }

    void eliminate() {
        int pi = 0, pj = 0;
        while (find_unit_pivot(pi, pj)) {
            long long p = rows[static_cast<std::size_t>(pi)].at(pj);
            std::vector<int> targets(col_rows[static_cast<std::size_t>(pj)].begin(),
                                     col_rows[static_cast<std::size_t>(pj)].end());
            for (int r : targets) {
                if (r == pi || !row_alive[static_cast<std::size_t>(r)]) continue;
                long long a = rows[static_cast<std::size_t>(r)].at(pj);
                row_axpy(r, pi, a * p);  // p = +-1, so a/p = a*p
            }
            // retire pivot row and column
            row_alive[static_cast<std::size_t>(pi)] = 0;
            col_alive[static_cast<std::size_t>(pj)] = 0;
            for (const auto& [j, v] : rows[static_cast<std::size_t>(pi)]) col_rows[static_cast<std::size_t>(j)].erase(pi);
            rows[static_cast<std::size_t>(pi)].clear();
            ++unit_pivots;
        }
    }

    IntMatrix remainder() const {
        std::vector<int> live_rows, live_cols;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (row_alive[i] && !rows[i].empty()) live_rows.push_back(static_cast<int>(i));
        std::vector<int> col_map(col_rows.size(), -1);
        for (std::size_t j = 0; j < col_rows.size(); ++j)
            if (col_alive[j] && !col_rows[j].empty()) {
                col_map[j] = static_cast<int>(live_cols.size());
                live_cols.push_back(static_cast<int>(j));
            }
        IntMatrix m(static_cast<int>(live_rows.size()), static_cast<int>(live_cols.size()));
        for (std::size_t li = 0; li < live_rows.size(); ++li)
            for (const auto& [j, v] : rows[static_cast<std::size_t>(live_rows[li])])
                if (col_alive[static_cast<std::size_t>(j)] && col_map[static_cast<std::size_t>(j)] >= 0)
                    m.at(static_cast<int>(li), col_map[static_cast<std::size_t>(j)]) = v;
        return m;
    }
};

}  // namespace

std::vector<BigInt> sparse_invariant_factors(const SparseIntMatrix& m) {
    try {
        SparseEliminator elim(m);
        elim.eliminate();
        IntMatrix rest = elim.remainder();
        std::vector<BigInt> factors(static_cast<std::size_t>(elim.unit_pivots), BigInt(1));
        if (rest.rows > 0 && rest.cols > 0) {
            std::vector<BigInt> tail = smith_invariant_factors(std::move(rest));
            factors.insert(factors.end(), tail.begin(), tail.end());
        }
        return factors;
    } catch (const std::overflow_error&) {
        // rare coefficient blow-up: redo exactly
        return smith_invariant_factors(m.dense());
    }
}

// --- chain complexes --------------------------------------------------

void SparseIntMatrix::sort_entries() {
    for (auto& c : col) std::sort(c.begin(), c.end());
}

IntMatrix SparseIntMatrix::dense() const {
    IntMatrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (const auto& [i, v] : col[static_cast<std::size_t>(j)]) m.at(i, j) += v;
    return m;
}

void ChainComplex::validate() const {
    if (boundary.size() != cells.size())
        throw IllFormedComplexError("boundary map count does not match dimension count");
    for (std::size_t k = 1; k < cells.size(); ++k) {
        const auto& dk = boundary[k];
        if (dk.cols != cells[k] || dk.rows != cells[k - 1])
            throw IllFormedComplexError("boundary matrix shape mismatch at degree " + std::to_string(k));
        for (const auto& c : dk.col)
            for (const auto& [i, v] : c)
                if (i < 0 || i >= dk.rows) throw IllFormedComplexError("boundary row index out of range");
    }
    // D_{k-1} * D_k = 0, computed sparsely per column.
    for (std::size_t k = 2; k < cells.size(); ++k) {
        const auto& dk = boundary[k];
        const auto& dk1 = boundary[k - 1];
        std::map<int, long long> acc;
        for (int j = 0; j < dk.cols; ++j) {
            acc.clear();
            for (const auto& [mid, v] : dk.col[static_cast<std::size_t>(j)])
                for (const auto& [i, w] : dk1.col[static_cast<std::size_t>(mid)]) acc[i] += v * w;
            for (const auto& [i, v] : acc)
                if (v != 0)
                    throw IllFormedComplexError("boundary of boundary nonzero at degree " +
                                                std::to_string(k));
        }
    }
}

namespace {

// Cells across all degrees flattened to global ids; alive flags plus
// face/coface adjacency drive the reduction cascade.
struct ComplexReducer {
    const ChainComplex& cx;
    std::vector<int> offset;                 // degree -> first global id
    std::vector<char> alive;
    std::vector<int> degree_of;
    std::vector<std::vector<std::pair<int, long long>>> faces, cofaces;
    std::vector<int> alive_faces, alive_cofaces;
    std::vector<long long> pairs_removed;    // per degree k: pairs (k-cell, (k-1)-cell)

    explicit ComplexReducer(const ChainComplex& complex) : cx(complex) {
        const int dims = static_cast<int>(cx.cells.size());
        offset.resize(static_cast<std::size_t>(dims) + 1, 0);
        for (int k = 0; k < dims; ++k) offset[static_cast<std::size_t>(k) + 1] = offset[static_cast<std::size_t>(k)] + cx.cells[static_cast<std::size_t>(k)];
        const int total = offset[static_cast<std::size_t>(dims)];
        alive.assign(static_cast<std::size_t>(total), 1);
        degree_of.resize(static_cast<std::size_t>(total));
        faces.resize(static_cast<std::size_t>(total));
        cofaces.resize(static_cast<std::size_t>(total));
        pairs_removed.assign(static_cast<std::size_t>(dims) + 1, 0);
        for (int k = 0; k < dims; ++k)
            for (int j = 0; j < cx.cells[static_cast<std::size_t>(k)]; ++j) degree_of[static_cast<std::size_t>(offset[static_cast<std::size_t>(k)] + j)] = k;
        for (int k = 1; k < dims; ++k) {
            const auto& dk = cx.boundary[static_cast<std::size_t>(k)];
            for (int j = 0; j < dk.cols; ++j) {
                int cell = offset[static_cast<std::size_t>(k)] + j;
                for (const auto& [i, v] : dk.col[static_cast<std::size_t>(j)]) {
                    if (v == 0) continue;
                    int face = offset[static_cast<std::size_t>(k) - 1] + i;
                    faces[static_cast<std::size_t>(cell)].push_back({face, v});
                    cofaces[static_cast<std::size_t>(face)].push_back({cell, v});
                }
            }
        }
        alive_faces.resize(static_cast<std::size_t>(total));
        alive_cofaces.resize(static_cast<std::size_t>(total));
        for (int c = 0; c < total; ++c) {
            alive_faces[static_cast<std::size_t>(c)] = static_cast<int>(faces[static_cast<std::size_t>(c)].size());
            alive_cofaces[static_cast<std::size_t>(c)] = static_cast<int>(cofaces[static_cast<std::size_t>(c)].size());
        }
    }

    // Unique alive face of c, if the count is one.
    std::pair<int, long long> sole_alive_face(int c) const {
        for (const auto& [f, v] : faces[static_cast<std::size_t>(c)])
            if (alive[static_cast<std::size_t>(f)]) return {f, v};
        return {-1, 0};
    }
    std::pair<int, long long> sole_alive_coface(int c) const {
        for (const auto& [f, v] : cofaces[static_cast<std::size_t>(c)])
            if (alive[static_cast<std::size_t>(f)]) return {f, v};
        return {-1, 0};
    }

    void kill(int cell, std::deque<int>& work) {
        alive[static_cast<std::size_t>(cell)] = 0;
        for (const auto& [f, v] : faces[static_cast<std::size_t>(cell)])
            if (alive[static_cast<std::size_t>(f)]) {
                --alive_cofaces[static_cast<std::size_t>(f)];
                work.push_back(f);
            }
        for (const auto& [f, v] : cofaces[static_cast<std::size_t>(cell)])
            if (alive[static_cast<std::size_t>(f)]) {
                --alive_faces[static_cast<std::size_t>(f)];
                work.push_back(f);
            }
    }

    void run() {
        std::deque<int> work;
        for (int c = 0; c < static_cast<int>(alive.size()); ++c) work.push_back(c);
        while (!work.empty()) {
            int c = work.front();
            work.pop_front();
            if (!alive[static_cast<std::size_t>(c)]) continue;
            // Coreduction: c has exactly one alive face with unit coefficient.
            if (alive_faces[static_cast<std::size_t>(c)] == 1) {
                auto [f, v] = sole_alive_face(c);
                if (f >= 0 && (v == 1 || v == -1)) {
                    kill(c, work);
                    kill(f, work);
                    ++pairs_removed[static_cast<std::size_t>(degree_of[static_cast<std::size_t>(c)])];
                    continue;
                }
            }
            // Reduction: c has exactly one alive coface with unit coefficient.
            if (alive_cofaces[static_cast<std::size_t>(c)] == 1) {
                auto [f, v] = sole_alive_coface(c);
                if (f >= 0 && (v == 1 || v == -1)) {
                    kill(f, work);
                    kill(c, work);
                    ++pairs_removed[static_cast<std::size_t>(degree_of[static_cast<std::size_t>(f)])];
                }
            }
        }
    }

    // Residual boundary matrix C_k -> C_{k-1} over the alive cells.
    SparseIntMatrix residual_boundary(int k, const std::vector<std::vector<int>>& alive_ids,
                                      const std::vector<int>& local_index) const {
        const auto& cols_k = alive_ids[static_cast<std::size_t>(k)];
        const auto& rows_k = alive_ids[static_cast<std::size_t>(k) - 1];
        SparseIntMatrix m(static_cast<int>(rows_k.size()), static_cast<int>(cols_k.size()));
        for (std::size_t j = 0; j < cols_k.size(); ++j) {
            int cell = cols_k[j];
            for (const auto& [f, v] : faces[static_cast<std::size_t>(cell)])
                if (alive[static_cast<std::size_t>(f)])
                    m.add_entry(local_index[static_cast<std::size_t>(f)], static_cast<int>(j), v);
        }
        m.sort_entries();
        return m;
    }
};

}  // namespace

std::vector<DegreeHomology> chain_homology(const ChainComplex& complex) {
    complex.validate();
    const int dims = static_cast<int>(complex.cells.size());
    if (dims == 0) return {};

    ComplexReducer reducer(complex);
    reducer.run();

    std::vector<std::vector<int>> alive_ids(static_cast<std::size_t>(dims));
    std::vector<int> local_index(reducer.alive.size(), -1);
    std::size_t residual_total = 0;
    for (int k = 0; k < dims; ++k) {
        for (int j = 0; j < complex.cells[static_cast<std::size_t>(k)]; ++j) {
            int cell = reducer.offset[static_cast<std::size_t>(k)] + j;
            if (reducer.alive[static_cast<std::size_t>(cell)]) {
                local_index[static_cast<std::size_t>(cell)] = static_cast<int>(alive_ids[static_cast<std::size_t>(k)].size());
                alive_ids[static_cast<std::size_t>(k)].push_back(cell);
                ++residual_total;
            }
        }
    }
    if (residual_total > 20000)
        throw IllFormedComplexError("residual complex too large after reduction");
    if (std::getenv("MILNOR_HOMOLOGY_STATS")) {
        std::fprintf(stderr, "residual cells per degree:");
        for (int k = 0; k < dims; ++k)
            std::fprintf(stderr, " %zu", alive_ids[static_cast<std::size_t>(k)].size());
        std::fprintf(stderr, "\n");
    }

    // rank D_k = removed pairs at degree k + residual rank; torsion of H_k
    // comes from the residual invariant factors of D_{k+1}.
    std::vector<long long> rank_d(static_cast<std::size_t>(dims) + 1, 0);
    std::vector<std::vector<BigInt>> torsion_from(static_cast<std::size_t>(dims) + 1);
    for (int k = 1; k < dims; ++k) {
        SparseIntMatrix m = reducer.residual_boundary(k, alive_ids, local_index);
        std::vector<BigInt> factors = sparse_invariant_factors(m);
        rank_d[static_cast<std::size_t>(k)] = reducer.pairs_removed[static_cast<std::size_t>(k)] + static_cast<long long>(factors.size());
        for (const auto& f : factors)
            if (f > 1) torsion_from[static_cast<std::size_t>(k)].push_back(f);
    }

    std::vector<DegreeHomology> out(static_cast<std::size_t>(dims));
    for (int k = 0; k < dims; ++k) {
        out[static_cast<std::size_t>(k)].rank =
            complex.cells[static_cast<std::size_t>(k)] - rank_d[static_cast<std::size_t>(k)] - rank_d[static_cast<std::size_t>(k) + 1];
        out[static_cast<std::size_t>(k)].torsion = torsion_from[static_cast<std::size_t>(k) + 1];
    }
    return out;
}

}  // namespace milnor
