#pragma once

#include "subeq/geometry.hpp"

namespace subeq {

enum class NodeClass : unsigned char { Exterior, Interior, Boundary };

/// Rectangular lattice over a chart box. Interior nodes satisfy rho < 0 and
/// keep the whole 3^n stencil inside the box; boundary nodes are the
/// non-interior nodes 3^n-adjacent to an interior node.
struct Grid {
    Box box;
    std::vector<int> dims;   // nodes per axis (>= 3 for any interior)
    Eigen::VectorXd h;       // spacing per axis
    std::vector<NodeClass> mask;
    std::vector<long> interior;  // flat indices, lexicographic
    std::vector<long> boundary;

    static Grid make(const Box& box, const std::vector<int>& dims, const DomainSpec& domain);

    int dim() const { return int(dims.size()); }
    long size() const { return long(mask.size()); }
    long flat(const std::vector<int>& idx) const;
    std::vector<int> unflat(long f) const;
    Eigen::VectorXd coords(long f) const;
    long stride(int axis) const { return strides_[axis]; }

private:
    std::vector<long> strides_;
};

struct GridFunction {
    const Grid* grid = nullptr;
    Eigen::VectorXd values;

    static GridFunction zeros(const Grid& g) {
        return GridFunction{&g, Eigen::VectorXd::Zero(g.size())};
    }
    static GridFunction from(const Grid& g,
                             const std::function<double(const Eigen::VectorXd&)>& f);
    double operator[](long i) const { return values[i]; }
    double& operator[](long i) { return values[i]; }
};

/// CSV layout: line 1 is the header `dims,h,origin`; line 2 carries the three
/// tuples joined with 'x'; the remaining lines list row-major values, one
/// lexicographic slab of the last axis per line.
void write_grid_csv(const std::string& path, const GridFunction& u);
/// Reads values back into a function on `g` (shape must match).
GridFunction read_grid_csv(const std::string& path, const Grid& g);

}  // namespace subeq
