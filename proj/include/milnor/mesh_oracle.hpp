#ifndef MILNOR_MESH_ORACLE_HPP
#define MILNOR_MESH_ORACLE_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "milnor/homology.hpp"
#include "milnor/parallel.hpp"
#include "milnor/polynomial.hpp"

namespace milnor {

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simplicial approximation of f_t^{-1}(level) clipped to the closed
// delta-ball. n = 1: segments in the disc; n = 2: triangles in the ball.
// The boundary subcomplex collects the cells meeting |x| = delta.
struct MeshComplex {
    int n = 1;  // intrinsic dimension
    double delta = 1.0;
    double resolution = 0.0;  // grid spacing actually used
    double level = 0.0;       // meshed value of f_t

    std::vector<std::array<double, 3>> vertices;  // third coordinate unused when n = 1
    std::vector<std::array<int, 2>> segments;     // n = 1 top cells
    std::vector<std::array<int, 3>> triangles;    // n = 2 top cells

    std::vector<std::array<int, 2>> edges;  // n = 2: derived 1-cells (sorted pairs)
    std::vector<char> boundary_vertex;      // topological boundary, validated near the sphere
    std::vector<char> boundary_edge;        // per entry of `edges`

    int num_cells(int k) const;
    long long euler_characteristic_rel() const;  // alternating relative cell count
};

struct MeshConfig {
    double resolution = 0.0;  // 0: delta/128 (n=1) or delta/48 (n=2)
    int max_refine = 2;       // halvings attempted on non-manifold output
    ExecMode exec = ExecMode::parallel;
    std::uint64_t seed = 0;   // only used for diagnostics sampling
};

MeshComplex extract_fibre(const Polynomial& f_t, double level, double delta,
                          const MeshConfig& cfg = {});

// Relative chain complex C_*(M) / C_*(boundary subcomplex).
ChainComplex relative_chain_complex(const MeshComplex& m);

HomologyReport relative_homology_mesh(const MeshComplex& m);

struct CompareVerdict {
    bool agree = true;
    std::optional<int> first_mismatch_degree;
    bool ranks_equal = true;
    bool mesh_torsion_free = true;
    bool euler_equal = true;
    std::string note;
};

CompareVerdict compare(const HomologyReport& morse, const HomologyReport& mesh);

// OFF text export; boundary cells listed in a trailing comment block.
void write_off(const MeshComplex& m, std::ostream& out);

}  // namespace milnor

#endif
