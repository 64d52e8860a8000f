#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "topsim/ingest.hpp"

namespace topsim {

enum class ComplexKind { VR, Alpha };

std::string to_string(ComplexKind k);
ComplexKind complex_kind_from_string(const std::string& s);

/// An abstract simplex: strictly increasing vertex indices (this sorted
/// order is the orientation convention) and a filtration value in Angstrom.
struct Simplex {
    std::vector<int> vertices;
    double filtration = 0.0;

    int dim() const { return static_cast<int>(vertices.size()) - 1; }
};

/// Simplices per dimension, lexicographically ordered by vertex tuple.
/// The position of a simplex within its dimension is stable and defines
/// the row/column ordering of every matrix built downstream.
class SimplicialComplex {
  public:
    static constexpr int kMaxDim = 3;

    ComplexKind kind = ComplexKind::VR;
    double threshold = 0.0;
    int p_max = 0;  // highest dimension present
    std::shared_ptr<const PointCloud> cloud;

    const std::vector<Simplex>& simplices(int dim) const;
    std::size_t count(int dim) const;

    /// Index of the simplex with the given (sorted) vertices within its
    /// dimension, or -1 if absent.
    int index_of(const std::vector<int>& vertices) const;
    bool contains(const std::vector<int>& vertices) const;

    /// Appends a simplex; call finalize() once all simplices are in.
    void add(Simplex s);

    /// Sorts each dimension lexicographically, rebuilds lookup tables and
    /// checks downward closure and filtration monotonicity.
    void finalize();

    /// Total number of simplices across dimensions.
    std::size_t total() const;

  private:
    std::array<std::vector<Simplex>, kMaxDim + 1> by_dim_;
    std::array<std::unordered_map<std::uint64_t, int>, kMaxDim + 1> lookup_;

    static std::uint64_t key_of(const std::vector<int>& vertices);
};

/// Vietoris-Rips complex: a vertex set of size <= p_max+1 is a simplex iff
/// all pairwise distances are <= threshold (closed convention). Edge
/// filtration is the pair distance; higher simplices take the max over
/// their edges.
SimplicialComplex build_vr(const PointCloud& cloud, double threshold, int p_max);

/// Number of (p+1)-cofaces of the given simplex in K. Throws if the simplex
/// is not in K.
int upper_degree(const SimplicialComplex& K, const Simplex& s);

/// All faces of one simplex obtained by deleting a single vertex.
std::vector<std::vector<int>> facets_of(const std::vector<int>& vertices);

}  // namespace topsim
